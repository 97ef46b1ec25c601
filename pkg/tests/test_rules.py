"""Reduction-rule regression table."""

import pytest

from bergman_model.rules import RULES, Rule, evaluate_rule, rule_by_name


def test_rule_names_are_unique():
    names = [r.name for r in RULES]
    assert len(names) == len(set(names))


@pytest.mark.parametrize("rule", RULES, ids=lambda r: r.name)
def test_rule_holds_symbolically(rule):
    same, gap = evaluate_rule(rule, 2)
    assert same, f"numeric gap {gap:.3e}"


def test_wrong_rule_is_detected_with_numeric_gap():
    bad = Rule("bad", "deliberately wrong", "(b j P)", "(kernel (* pi (- (zb j) (zbp j))))", free=("j",))
    same, gap = evaluate_rule(bad, 2)
    assert not same and gap > 1.0


def test_lookup_by_name():
    assert rule_by_name("rule-bplus-kills-projector").name == "rule-bplus-kills-projector"
    with pytest.raises(KeyError):
        rule_by_name("rule-none")

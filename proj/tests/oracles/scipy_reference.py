"""Frozen scipy results for the hypothesis tests on fixed data.

Writes tests/unit/scipy_reference.inc.
"""
import numpy as np
from scipy import stats

rng = np.random.default_rng(7)
a = np.round(rng.normal(10.0, 2.0, 25), 3)
b = np.round(rng.normal(11.0, 3.5, 30), 3)
x = np.round(rng.normal(0.0, 1.0, 40), 3)
y = np.round(0.5 * x + rng.normal(0.0, 1.0, 40), 3)
s = np.round(rng.exponential(1.0, 60), 3)

rows = []
t = stats.ttest_ind(a, b, equal_var=False)
rows.append(("welch_t_stat", t.statistic)); rows.append(("welch_t_p", t.pvalue))
u = stats.mannwhitneyu(a, b, alternative="two-sided", method="asymptotic", use_continuity=True)
rows.append(("mw_u", u.statistic)); rows.append(("mw_p", u.pvalue))
lv = stats.levene(a, b, center="median")
rows.append(("levene_stat", lv.statistic)); rows.append(("levene_p", lv.pvalue))
lm = stats.levene(a, b, center="mean")
rows.append(("levene_mean_stat", lm.statistic)); rows.append(("levene_mean_p", lm.pvalue))
fk = stats.fligner(a, b)
rows.append(("fligner_stat", fk.statistic)); rows.append(("fligner_p", fk.pvalue))
pr = stats.pearsonr(x, y)
rows.append(("pearson_r", pr.statistic)); rows.append(("pearson_p", pr.pvalue))
sr = stats.spearmanr(x, y)
rows.append(("spearman_r", sr.statistic)); rows.append(("spearman_p", sr.pvalue))
sk = stats.skewtest(s)
rows.append(("skew_z", sk.statistic)); rows.append(("skew_p", sk.pvalue))
rows.append(("skew_g1", stats.skew(s)))
table = np.array([[12, 30, 8], [20, 15, 25]])
c = stats.chi2_contingency(table, correction=False)
rows.append(("chi2_stat", c[0])); rows.append(("chi2_p", c[1]))


def arr(name, values):
    return f"inline const std::vector<double> {name} = {{{', '.join(repr(float(v)) for v in values)}}};\n"


with open("tests/unit/scipy_reference.inc", "w") as out:
    out.write("// Generated by tests/oracles/scipy_reference.py; do not edit.\n")
    for name, v in (("ref_a", a), ("ref_b", b), ("ref_x", x), ("ref_y", y), ("ref_s", s)):
        out.write(arr(name, v))
    for name, v in rows:
        out.write(f"inline constexpr double {name} = {float(v)!r};\n")

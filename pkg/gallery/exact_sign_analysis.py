"""
Exact sign analysis with rational polynomials
=============================================

For rational ``r = p/q`` the substitution ``x = t**q`` turns the convexity
and log-convexity numerators into integer polynomials. Descartes' rule of
signs bounds their positive roots; when the bound equals the known root
multiplicity at ``t = 1`` the sign on ``(0, 1)`` and ``(1, inf)`` is settled.
"""

from fractions import Fraction

from posdef_lab import build_psi_poly, sign_analysis, verify_convexity, verify_logconvexity

# the log-convexity numerator for r = 2 is a perfect fourth power
print("psi for r = 2:", build_psi_poly(2, 1))

# a conclusive case: 4 sign changes, root of multiplicity 4 at t = 1
print(sign_analysis(build_psi_poly(3, 2)))

# convexity holds for every r > 1
for r in ("3/2", "7/3", "9"):
    res = verify_convexity(Fraction(r))
    print(f"r = {r:>4}: {res.verdict.value}, {res.report.sign_changes} sign changes")

# log-convexity stops at r = 2; above it an exact negative value is found
for r in ("2", "5/2", "3", "9"):
    res = verify_logconvexity(Fraction(r))
    print(f"r = {r:>4}: {res.verdict.value}", res.witness or "")

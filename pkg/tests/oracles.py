"""Frozen expected values, computed independently of the implementation.

The standard normal CDF values below were evaluated with a 40-digit
erfc series (mpmath) before the weather module was written, then
truncated to double precision. They anchor both the unit tests and the
acceptance suite; the implementation is never consulted to produce
them.
"""

# Phi(1) and Phi(-8/3): the validation probabilities at c_f = 0 and
# c_f = 1 for u=0.1, v=0.2, c_max=0.2
PHI_AT_1 = 0.84134474606854295
PHI_AT_MINUS_8_3 = 0.0038303805675897356

# Phi((0.2 - c_f) / (0.1 * c_f + 0.2)) on the acceptance grid
VALIDATION_TABLE = {
    0.0: 0.84134474606854295,
    0.1: 0.68303065805932713,
    0.2: 0.5,
    0.3: 0.33186011482280111,
    0.4: 0.20232838096364303,
    0.5: 0.11506967022170827,
    0.6: 0.061967902836371223,
    0.7: 0.032023549740721513,
    0.8: 0.016062285603828315,
    0.9: 0.0078937121171823828,
    1.0: 0.0038303805675897356,
}

# hand-evaluated trade-off score for p = (0.8, 0.5, 0.5), alpha = 1,
# beta = 0.99, three passes: 0.8 + 1 - (0.99^2*0.5 + 0.99^3*0.5)/2
HEURISTIC_WORKED_EXAMPLE = 1.31240025

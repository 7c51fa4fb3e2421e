"""Reference values computed once by tests/oracles.py and frozen here.

test_oracles.py recomputes each of them so a drifting oracle is caught.
"""

# nested-radical closed form, 40 digits
OCTIC_SIGMA1_THETA = "-0.03467536415041360786483535574716324"
OCTIC_SIGMA2_THETA = "-1.9653246358495863921351646442528368"
OCTIC_LAMBDA1_E1 = "-3.36172581102200596978724608081"
OCTIC_LAMBDA2_E1 = "0.675657440759465746341719926498"

# sympy resultant norms of the four generators
OCTIC_GENERATOR_NORMS = (1, 1, 1, 1)

# sympy minimal polynomials (ascending coefficients)
OCTIC_MINPOLY_SQRT2_MINUS_1 = (-1, 2, 1)
OCTIC_MINPOLY_SQRT2 = (-2, 0, 1)

# 2 eps_0 / |lambda_1(e_1) - lambda_2(e_1)| at eps_0 = 3.4
OCTIC_A_BOUND = 6.8 / (0.675657440759465746341719926498 + 3.36172581102200596978724608081)

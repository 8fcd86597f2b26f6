"""
The optiquad command line
=========================

The same entry point as the ``optiquad`` console script.
"""

from optiquad.cli import main

main(["derive"])
main(["integrate", "--expr", "exp(t)", "--n", "8"])
main(["integrate", "--expr", "sqrt(t)", "--gamma1", "0.5"])
main(["compare", "--expr", "exp(t)"])
main(["study", "--expr", "exp(t)", "--n", "1,2,4,8,16,32", "--format", "csv"])

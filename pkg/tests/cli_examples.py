"""CLI invocations shared by the CLI tests and the acceptance suite."""

# Every command shown in the README.
DOCUMENTED = [
    "rule --kind laguerre --n 2",
    "rule --kind mgi --n 3 --gamma 0.5 --format json",
    "invlap --pair exp --t 0.5,1,2 --method stehfest",
    "invlap --transform 1/s^2 --t 1 --method gli --n 64 --c 1",
    "invlap --pair power:0.5 --t 1:2:0.5 --method mgi --n 64 --verbose",
    "deriv --f t --alpha 0.5 --class rl --method glsum --t 1 --h 0.0001",
    "deriv --f t^2 --alpha 0.5 --class caputo --method stehfest --t 1",
    "deriv --f t+1 --init 1 --alpha 0.5 --class rl --method direct --t 1",
    "compare --f t^2 --alpha 0.5 --t 0.5,1,2 --oracle power:2",
    "pairs",
]

USAGE_ERRORS = [
    "deriv --f t --alpha 0.5 --class rl --method glsum --t -1",
    "deriv --f t --alpha 0.5 --class rl --method glsum --t 0",
    "deriv --f t --alpha 0.5 --class rl --method glsum --t 1,abc",
    "deriv --f t** --alpha 0.5 --class rl --method glsum --t 1",
    "deriv --f t --alpha -0.5 --class rl --method glsum --t 1",
    "deriv --f t --alpha 0.5 --class rl --method glsum --t 1 --h 0",
    "deriv --f t --alpha 0.5 --class rl --method glsum --t 1 --h 2",
    "deriv --f t --alpha 0.5 --class xx --method glsum --t 1",
    "deriv --f t*sin(t) --alpha 0.5 --class caputo --method gli --t 1",
    "deriv --f t --alpha 0.5 --class caputo --method stehfest --n 7 --t 1",
    "deriv --f t --alpha 2.5 --class caputo --method direct --t 1",
    "invlap --t 1",
    "invlap --pair exp --transform 1/s --t 1",
    "invlap --pair nope --t 1",
    "invlap --transform gamma(s) --t 1",
    "rule --kind laguerre --n 0",
    "rule --kind hermite --n 3",
    "compare --f t^2 --alpha 0.5 --t 1 --oracle sin:1",
    "compare --f t^2 --alpha 0.5 --t 1 --oracle power:-2",
    "frobnicate",
]

NUMERIC_ERRORS = [
    "invlap --pair one --t 1 --c -1",
    "invlap --transform exp(s^4) --t 1",
    "deriv --f ln(t-2) --alpha 0.5 --class caputo --method direct --t 1",
    # first row succeeds, second fails: nothing may be printed
    "deriv --f ln(2-t) --alpha 0.5 --class caputo --method direct --t 1,3",
]

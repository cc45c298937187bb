"""Published reference measurements for the chain family.

Restart counts are means over five seeded runs of a restart-on-every-conflict
solver with random branching and no clause deletion. Entries marked as single
runs in the source are flagged.
"""

# (w, d) -> (n, mean restarts, single run) for 1UIP with conflict-clause minimization
MINISAT_LIKE_RESTARTS = {
    (2, 2): (8, 19, False),
    (2, 3): (12, 157, False),
    (2, 4): (16, 820, False),
    (2, 5): (20, 3039, False),
    (2, 6): (24, 7797, False),
    (2, 7): (28, 17599, False),
    (2, 8): (32, 36108, False),
    (2, 9): (36, 65318, False),
    (2, 10): (40, 114827, False),
    (3, 2): (15, 167, False),
    (3, 3): (24, 5039, False),
    (3, 4): (33, 41478, False),
    (3, 5): (42, 210298, False),
    (3, 6): (51, 731860, False),
    (4, 2): (24, 1617, False),
    (4, 3): (40, 108113, False),
    (4, 4): (56, 1322784, True),
}

# (w, d) -> (n, direct-encoding clauses, 1UIP restarts, DECISION restarts), minimization off
SCHEME_RESTARTS = {
    (2, 2): (8, 49, 21, 23),
    (2, 3): (12, 298, 203, 267),
    (2, 4): (16, 1162, 1026, 1424),
    (2, 5): (20, 3415, 4068, 5283),
    (2, 6): (24, 8315, 12029, 14104),
    (2, 7): (28, 17724, 27356, 33621),
    (2, 8): (32, 34228, 56193, 64262),
    (2, 9): (36, 61257, 109862, 113460),
    (2, 10): (40, 103205, 199399, 190063),
    (3, 2): (15, 198, 192, 287),
    (3, 3): (24, 3141, 5952, 7308),
    (3, 4): (33, 23611, 63952, 91283),
    (3, 5): (42, 113406, 375849, 391664),
    (3, 6): (51, 408720, 1584012, 1365481),
    (4, 2): (24, 863, 1937, 2592),
    (4, 3): (40, 34666, 155842, 253153),
}

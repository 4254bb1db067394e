"""Reference curves used for regression and calibration.

Values are the plotted data of the reference simulation: channel gains and
secrecy rates against Eve's offset along the wall (21 points, -1 to 1 m in
0.1 m steps), and secrecy rates against mirror edge (4 to 12 cm) at Eve
offset 0.1 m for 4x4, 5x5 and 6x6 arrays.  Rates are in nats per channel use.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "EVE_X",
    "GAIN_CURVES",
    "MIRROR_EDGES_CM",
    "REFERENCE_LOS_BOB",
    "RATE_CURVES",
    "SIZE_CURVES",
    "secrecy_triples",
]

#: Eve x offsets of the gain and rate curves, meters.
EVE_X = tuple(round(-1.0 + 0.1 * k, 10) for k in range(21))

#: Channel gains (normalised units) keyed by series name.
GAIN_CURVES = {
    "los_bob": (
        0.209995657404435,
        0.209995657404435,
        0.209995657404435,
        0.209995657404435,
        0.209995657404435,
        0.209995657404435,
        0.209995657404435,
        0.209995657404435,
        0.209995657404435,
        0.209995657404435,
        0.209995657404435,
        0.209995657404435,
        0.209995657404435,
        0.209995657404435,
        0.209995657404435,
        0.209995657404435,
        0.209995657404435,
        0.209995657404435,
        0.209995657404435,
        0.209995657404435,
        0.209995657404435,
    ),
    "los_eve": (
        0.167108549538856,
        0.174532065352172,
        0.181580607102304,
        0.188143010371494,
        0.19410834077006,
        0.199369517998889,
        0.203827159602599,
        0.207393430426236,
        0.209995657404435,
        0.211579463950729,
        0.212111197120831,
        0.211579463950729,
        0.209995657404435,
        0.207393430426236,
        0.203827159602599,
        0.199369517998889,
        0.19410834077006,
        0.188143010371494,
        0.181580607102304,
        0.174532065352172,
        0.167108549538856,
    ),
    "irs_bob_rsf": (
        0.133849900368258,
        0.133824467569904,
        0.13420840338793,
        0.134156499681843,
        0.133944183780738,
        0.133849900368258,
        0.133824467569904,
        0.134114008905717,
        0.134156499681843,
        0.133944183780738,
        0.133158789673982,
        0.128257224256646,
        0.124613407645021,
        0.129930190328159,
        0.134365123500506,
        0.133849900368258,
        0.133824467569904,
        0.13420840338793,
        0.134156499681843,
        0.133944183780738,
        0.133158789673982,
    ),
    "irs_eve_rsf": (
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.124613407645021,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ),
    "irs_bob_fob": (
        0.124613407645021,
        0.124613407645021,
        0.124613407645021,
        0.124613407645021,
        0.124613407645021,
        0.124613407645021,
        0.124613407645021,
        0.124613407645021,
        0.124613407645021,
        0.124613407645021,
        0.124613407645021,
        0.124613407645021,
        0.124613407645021,
        0.124613407645021,
        0.124613407645021,
        0.124613407645021,
        0.124613407645021,
        0.124613407645021,
        0.124613407645021,
        0.124613407645021,
        0.124613407645021,
    ),
    "irs_eve_fob": (
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.122875462234077,
        0.124613407645021,
        0.121089828413045,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ),
    "sum_bob_rsf": (
        0.343845557772693,
        0.343820124974339,
        0.344204060792365,
        0.344152157086278,
        0.343939841185173,
        0.343845557772693,
        0.343820124974339,
        0.344109666310152,
        0.344152157086278,
        0.343939841185173,
        0.343154447078417,
        0.338252881661081,
        0.334609065049456,
        0.339925847732594,
        0.344360780904941,
        0.343845557772693,
        0.343820124974339,
        0.344204060792365,
        0.344152157086278,
        0.343939841185173,
        0.343154447078417,
    ),
    "sum_eve_rsf": (
        0.167108549538856,
        0.174532065352172,
        0.181580607102304,
        0.188143010371494,
        0.19410834077006,
        0.199369517998889,
        0.203827159602599,
        0.207393430426236,
        0.209995657404435,
        0.211579463950729,
        0.212111197120831,
        0.211579463950729,
        0.334609065049456,
        0.207393430426236,
        0.203827159602599,
        0.199369517998889,
        0.19410834077006,
        0.188143010371494,
        0.181580607102304,
        0.174532065352172,
        0.167108549538856,
    ),
    "sum_bob_fob": (
        0.334609065049456,
        0.334609065049456,
        0.334609065049456,
        0.334609065049456,
        0.334609065049456,
        0.334609065049456,
        0.334609065049456,
        0.334609065049456,
        0.334609065049456,
        0.334609065049456,
        0.334609065049456,
        0.334609065049456,
        0.334609065049456,
        0.334609065049456,
        0.334609065049456,
        0.334609065049456,
        0.334609065049456,
        0.334609065049456,
        0.334609065049456,
        0.334609065049456,
        0.334609065049456,
    ),
    "sum_eve_fob": (
        0.167108549538856,
        0.174532065352172,
        0.181580607102304,
        0.188143010371494,
        0.19410834077006,
        0.199369517998889,
        0.203827159602599,
        0.207393430426236,
        0.209995657404435,
        0.211579463950729,
        0.212111197120831,
        0.334454926184806,
        0.334609065049456,
        0.328483258839281,
        0.203827159602599,
        0.199369517998889,
        0.19410834077006,
        0.188143010371494,
        0.181580607102304,
        0.174532065352172,
        0.167108549538856,
    ),
}

#: Secrecy rate against Eve offset, keyed by method.
RATE_CURVES = {
    "RSF": (
        0.543251175389834,
        0.499939442963088,
        0.461652598302076,
        0.426157760885028,
        0.394457983776051,
        0.367546176357525,
        0.345442925016605,
        0.329000492893704,
        0.316698177232087,
        0.308594199428498,
        0.305819061941522,
        0.268220611142291,
        0.0,
        0.308461865074352,
        0.345790418556026,
        0.367546176357525,
        0.39411049023663,
        0.426308288844042,
        0.461502070343061,
        0.500286936502509,
        0.541242915516691,
    ),
    "FoB": (
        0.516072926560884,
        0.472835026576918,
        0.433434179216596,
        0.398089869758562,
        0.36700607385046,
        0.340367927528575,
        0.318338508630436,
        0.301055847760186,
        0.288630286105621,
        0.281142289502907,
        0.278640813112572,
        0.0,
        0.0,
        0.0,
        0.318338508630436,
        0.340367927528575,
        0.36700607385046,
        0.398089869758562,
        0.433434179216596,
        0.472835026576919,
        0.516072926560884,
    ),
    "NoIRS": (
        0.0516889569436838,
        0.00845105695971803,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.00845105695971825,
        0.0516889569436838,
    ),
}

#: Mirror edges of the size curves, centimeters.
MIRROR_EDGES_CM = (4, 5, 6, 7, 8, 9, 10, 11, 12)

#: Secrecy rate against mirror edge at Eve offset 0.1 m, keyed by (array side, method).
SIZE_CURVES = {
    (4, "RSF"): (
        0.0461055515397542,
        0.0596756932702154,
        0.0731410083123541,
        0.0868744354864461,
        0.0999779414131383,
        0.112636583600182,
        0.125043307412991,
        0.139150817851691,
        0.151575152179034,
    ),
    (4, "FoB"): (
        0.0380628202720402,
        0.0494338804818047,
        0.0609369474045944,
        0.0723283032077466,
        0.0842868820513399,
        0.0,
        0.0,
        0.0,
        0.0,
    ),
    (4, "NoIRS"): (
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ),
    (5, "RSF"): (
        0.171381066591703,
        0.193601841351951,
        0.216448247351176,
        0.238574082933051,
        0.262414079784946,
        0.28140797221369,
        0.301261921710655,
        0.307492393029482,
        0.33888182038867,
    ),
    (5, "FoB"): (
        0.160103223906746,
        0.17997235852137,
        0.200201086603236,
        0.219856902498936,
        0.238901302187506,
        0.120629977842965,
        0.0,
        0.0,
        0.0,
    ),
    (5, "NoIRS"): (
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ),
    (6, "RSF"): (
        0.315328114433941,
        0.34861716406436,
        0.381574385124701,
        0.413909346901007,
        0.445713479533526,
        0.46325526600373,
        0.490275254763371,
        0.517659484711801,
        0.54885190398189,
    ),
    (6, "FoB"): (
        0.30074765841582,
        0.331256001483715,
        0.360505177473407,
        0.389176129333446,
        0.417800518785727,
        0.285447022809717,
        0.0,
        0.0,
        0.0,
    ),
    (6, "NoIRS"): (
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ),
}

#: Bob's LoS gain in the reference curves; target of the "reference" calibration.
REFERENCE_LOS_BOB = GAIN_CURVES["los_bob"][0]


def secrecy_triples(methods=("RSF", "FoB")) -> tuple[np.ndarray, np.ndarray, np.ndarray, list]:
    """``(h_bob, h_eve, rate, labels)`` for every rate point whose gains are plotted.

    ``NoIRS`` uses the LoS curves as its sum gains.  ``labels`` holds
    ``(method, eve_x)`` pairs.
    """
    hb, he, rate, labels = [], [], [], []
    for method in methods:
        if method == "NoIRS":
            b, e = GAIN_CURVES["los_bob"], GAIN_CURVES["los_eve"]
        elif method in ("RSF", "FoB"):
            tag = method.lower()
            b, e = GAIN_CURVES[f"sum_bob_{tag}"], GAIN_CURVES[f"sum_eve_{tag}"]
        else:
            raise ValueError(f"unknown method {method!r}")
        hb.extend(b)
        he.extend(e)
        rate.extend(RATE_CURVES[method])
        labels.extend((method, x) for x in EVE_X)
    return np.array(hb), np.array(he), np.array(rate), labels

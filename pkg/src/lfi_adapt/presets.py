"""Bundled experiment suites for the two benchmark systems.

The *_paper suites reproduce the benchmark setups at full fidelity (3x1024
network, lr 1e-5); the *_desk suites shrink the network and raise the
learning rate so a full suite runs on a laptop in minutes.
"""

import copy

import numpy as np

LV_GROUND_TRUTH_LOG = [float(v) for v in np.log([0.01, 0.5, 1.0, 0.01])]
MG1_GROUND_TRUTH = [1.0, 5.0, 0.2]

LV_SUPPORTS = {
    "ok": [[-5.0, -5.0, -5.0, -5.0], [2.0, 2.0, 2.0, 2.0]],
    "misspecified": [[-3.0, -5.0, -5.0, -5.0], [2.0, -1.5, 2.0, 2.0]],
    "broad": [[-6.0] * 4, [4.0] * 4],
    "broader": [[-6.0] * 4, [5.0] * 4],
    "broadest": [[-7.0] * 4, [7.0] * 4],
}
LV_PHI = [[-6.0] * 4, [4.0] * 4]
# adaptation runs are bounded by phi; the non-adaptive wide variants need a
# feasible box that contains them
LV_PHI_WIDE = [[-7.0] * 4, [7.0] * 4]

MG1_SUPPORTS = {
    "ok": [[0.0, 0.0, 0.0], [10.0, 10.0, 0.35]],
    "misspecified": [[3.0, 0.0, 0.0], [10.0, 7.0, 0.35]],
    "broad": [[0.0, 0.0, 0.0], [20.0, 20.0, 0.5]],
}
MG1_PHI = [[0.0, 0.0, 0.0], [20.0, 20.0, 0.5]]

LV_EDGE = {"edge_zone_fraction": 0.1, "mass_threshold": 0.005, "expansion_factor": 0.2}
MG1_EDGE = {"edge_zone_fraction": 0.2, "mass_threshold": 0.001, "expansion_factor": 0.2}
MODE_PARAMS = {"shift_threshold": 0.01, "proximity_threshold": 0.4,
               "weight_sum_threshold": 0.05, "expansion_factor": 0.2}

MDN_PAPER = {"hidden_layers": [1024, 1024, 1024], "n_components": 4,
             "activation": "relu", "learning_rate": 1e-5, "batch_size": 100,
             "max_epochs": 500, "patience": 20, "warm_start": True}
MDN_DESK = {"hidden_layers": [128, 128], "n_components": 4,
            "activation": "relu", "learning_rate": 1e-3, "batch_size": 100,
            "max_epochs": 200, "patience": 20, "warm_start": True}


def _lv_variant(name, support_name, heuristic, mdn, n_iterations=10):
    phi = LV_PHI if support_name != "broadest" and support_name != "broader" \
        else LV_PHI_WIDE
    return {
        "name": name,
        "simulator": "lotka_volterra",
        "heuristic": heuristic,
        "initial_support": {"lower": LV_SUPPORTS[support_name][0],
                            "upper": LV_SUPPORTS[support_name][1]},
        "feasible_domain": {"lower": phi[0], "upper": phi[1]},
        "n_iterations": n_iterations,
        "successes_per_iter": 100,
        "max_attempts_per_iter": 125,
        "edge": dict(LV_EDGE),
        "mode": dict(MODE_PARAMS),
        "mdn": copy.deepcopy(mdn),
        "ground_truth": LV_GROUND_TRUTH_LOG,
        "observation_seed": 20201,
        "eval": {"n_samples": 20, "alpha": 1.0},
    }


def _mg1_variant(name, support_name, heuristic, mdn, n_iterations=15):
    v = {
        "name": name,
        "simulator": "mg1",
        "heuristic": heuristic,
        "initial_support": {"lower": MG1_SUPPORTS[support_name][0],
                            "upper": MG1_SUPPORTS[support_name][1]},
        "feasible_domain": {"lower": MG1_PHI[0], "upper": MG1_PHI[1]},
        "n_iterations": n_iterations,
        "successes_per_iter": 100,
        "max_attempts_per_iter": 125,
        "edge": dict(MG1_EDGE),
        "mode": dict(MODE_PARAMS),
        "mdn": copy.deepcopy(mdn),
        "ground_truth": MG1_GROUND_TRUTH,
        "observation_seed": 20202,
        "eval": {"n_samples": 20, "alpha": 1.0},
    }
    return v


def _suite(name, variants, seeds=(0, 1, 2, 3, 4)):
    return {"schema_version": 1, "name": name, "seeds": list(seeds),
            "variants": variants}


def lv_paper_suite(mdn=None):
    mdn = mdn or MDN_PAPER
    variants = [
        _lv_variant("ok_none", "ok", "none", mdn),
        _lv_variant("misspecified_none", "misspecified", "none", mdn),
        _lv_variant("broad_none", "broad", "none", mdn),
        _lv_variant("broader_none", "broader", "none", mdn),
        _lv_variant("broadest_none", "broadest", "none", mdn),
        _lv_variant("misspecified_edge", "misspecified", "edge", mdn),
        _lv_variant("misspecified_mode", "misspecified", "mode", mdn),
        _lv_variant("misspecified_centre", "misspecified", "centre", mdn),
    ]
    return _suite("lv_paper", variants)


def mg1_paper_suite(mdn=None):
    mdn = mdn or MDN_PAPER
    variants = [
        _mg1_variant("ok_none", "ok", "none", mdn),
        _mg1_variant("misspecified_none", "misspecified", "none", mdn),
        _mg1_variant("broad_none", "broad", "none", mdn),
        _mg1_variant("misspecified_edge", "misspecified", "edge", mdn),
        _mg1_variant("misspecified_mode", "misspecified", "mode", mdn),
        _mg1_variant("misspecified_centre", "misspecified", "centre", mdn),
    ]
    return _suite("mg1_paper", variants)


def lv_desk_suite():
    return lv_paper_suite(MDN_DESK) | {"name": "lv_desk"}


def mg1_desk_suite():
    return mg1_paper_suite(MDN_DESK) | {"name": "mg1_desk"}


PRESETS = {
    "lv_paper": lv_paper_suite,
    "mg1_paper": mg1_paper_suite,
    "lv_desk": lv_desk_suite,
    "mg1_desk": mg1_desk_suite,
}


def get_preset(name: str) -> dict:
    return PRESETS[name]()

import os

DEFAULT_CONFIG = {
    "project_dir": os.path.abspath(os.path.join(os.path.dirname(__file__), ".")),
    "results_dir": os.getenv("DFLREGRET_RESULTS_DIR", "./results"),
    "data_dir": os.getenv("DFLREGRET_DATA_DIR", "./data"),
    # Simplex kernel
    "lp": {
        "feas_tol": 1e-9,
        "opt_tol": 1e-9,
        "active_tol": 1e-7,
        "iteration_factor": 50,  # cap = factor * (rows + vars)
        "refactor_every": 64,
        "degenerate_switch": 50,  # consecutive degenerate pivots before Bland's rule
        "deadline_check_every": 16,  # pivots between clock checks of a deadline
    },
    # Training defaults (see dflregret.training.settings.TrainConfig)
    "training": {
        "ls_samples": 20,
        "ls_iters": 20,
        "alt_iters": 50,
        "alt_tol": 1e-9,
        "alt_patience": 3,
        "omega_bound": 1000.0,
        "workers": 1,
        "seed": 0,
    },
    # Quadratic reformulation export
    "reformulations": {
        "kappa": 0.1,
        "omega_bound": 1000.0,
        "with_cutoff": True,
    },
    # Benchmark harness; budgets in seconds before --scale is applied
    "bench": {
        "workers": 1,
        "scale": 1.0,
        "ls_budget_s": 1200.0,
        "alt_budget_s": 2400.0,
    },
    "logging": {
        "level": os.getenv("DFLREGRET_LOG_LEVEL", "INFO"),
        "json": False,
    },
}

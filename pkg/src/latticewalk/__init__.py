"""Monte Carlo engine and analysis toolkit for random walks on the space of
unimodular lattices SL(k0,R)/SL(k0,Z)."""

__version__ = "0.1.0"

from .core import (Dims, DiagonalSample, GroupElement, LieAlgebraElement,
                   UnipotentParam, ad_action, conj_scaling, embed_u,
                   product_Pi, q_project, theta_i)
from .lattice import (LatticePoint, Observable, ReductionError, apply,
                      ball_volume, reduce, shortest_bump, shortest_vector_len,
                      siegel_count)
from .measures import (CurveSpec, DiagonalLawSpec, UnipotentLawSpec, F_psi,
                       nonplanarity_check, nu_bar_mass_split,
                       pushforward_density_check)
from .stats import (LyapunovReport, RateFit, TailCurve, chernoff_rate,
                    chernoff_tail, conjugation_growth, estimate_rate,
                    expansion_set_mass, lyapunov_check, q_nonvanishing_check,
                    wilson_interval)
from .walk import (BirkhoffResult, EnsembleResult, TrialTrace, WalkConfig,
                   run_birkhoff, run_ensemble, run_trial, step_rng)

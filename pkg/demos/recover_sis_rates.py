"""Recover transmission rates from incidence-like observations.

The two-rate system (no latency, no waning) is observed only through
y = alpha*I and y1 = alpha*I1: scaled prevalence among everyone and
among the never-infected-before. Neither alpha nor the window of
observation is known to be anything special. Two recovery routes:

  equilibrium route: two late-time numbers and mu give beta and gamma;
  trajectory route:  a short early window gives alpha too, via the
                     derivative elimination.

Both are exercised on synthetic data from the simulator, so the truth
is known and the errors are honest.
"""

import numpy as np

from seirstrat import (
    IntegrationConfig,
    ModelParams,
    ObservedSeries,
    identify_from_equilibrium,
    identify_from_y_only,
    identify_full,
    integrate,
    make_vector_field,
)

ALPHA, BETA, GAMMA, MU = 0.6, 0.3, 0.1, 0.02  # per day


def main():
    p = ModelParams(beta=BETA, sigma=0.0, gamma=GAMMA, omega=0.0, mu=MU)
    f, _ = make_vector_field(p, "sis")
    x0 = np.array([0.98, 0.02, 0.98, 0.02])

    traj = integrate(
        f, x0, IntegrationConfig(t_start=0.0, t_end=2000.0, sample_interval=0.25)
    )
    y = ALPHA * traj.states[:, 1]
    y1 = ALPHA * traj.states[:, 3]

    print("truth: alpha = %.3f, beta = %.3f/day, gamma = %.3f/day" % (ALPHA, BETA, GAMMA))
    print()

    # equilibrium route: hand it the settled tail of the trajectory.
    # note it needs the UNSCALED fractions, i.e. someone must know alpha
    # to use it; the trajectory route below does not.
    i_eq, i1_eq = traj.states[-1, 1], traj.states[-1, 3]
    r0, theta, beta_hat, gamma_hat = identify_from_equilibrium(i_eq, i1_eq, MU)
    print("equilibrium route (exact tail):")
    print(f"  r0 = {r0:.6f}, first-infection share theta = {theta:.6f}")
    print(f"  beta  = {beta_hat:.6f}  (err {abs(beta_hat - BETA) / BETA:.2e})")
    print(f"  gamma = {gamma_hat:.6f}  (err {abs(gamma_hat - GAMMA) / GAMMA:.2e})")
    print()

    # trajectory route: a five-to-sixty-day upswing window
    series = ObservedSeries(times=traj.times, y=y, y1=y1).window(5.0, 60.0)
    res = identify_full(series, MU)
    print("trajectory route (upswing window, y and y1):")
    print(f"  alpha = {res.alpha:.6f}  (err {abs(res.alpha - ALPHA) / ALPHA:.2e})")
    print(f"  beta  = {res.beta:.6f}  (err {abs(res.beta - BETA) / BETA:.2e})")
    print(f"  gamma = {res.gamma:.6f}  (err {abs(res.gamma - GAMMA) / GAMMA:.2e})")
    print(f"  internal consistency residual = {res.residual:.2e}")
    print()

    # without y1 the full triple is out of reach, on principle rather
    # than numerics: y alone pins down only these two combinations
    boa, bmg = identify_from_y_only(
        ObservedSeries(times=series.times, y=series.y), MU
    )
    print("y-only route:")
    print(f"  beta/alpha   = {boa:.6f}  (truth {BETA / ALPHA:.6f})")
    print(f"  beta - gamma = {bmg:.6f}  (truth {BETA - GAMMA:.6f})")


if __name__ == "__main__":
    main()

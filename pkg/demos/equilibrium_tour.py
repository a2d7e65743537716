"""Endemic equilibrium, local spectra, and long-run population fate.

Two parameter sets: the shipped preset (harmless infection, births equal
deaths) and a lethal variant where infection mortality drags the
population down. For each we solve the balance equation, linearize, and
classify what happens to the raw head count.
"""

from seirstrat import (
    ModelParams,
    classify_fate,
    compute_r0,
    eigenvalues_4x4,
    jacobian_macro,
    jacobian_micro_block,
    solve_endemic,
)


def _show(z: complex) -> str:
    if z.imag == 0.0:
        return f"{z.real:.6f}"
    sign = "+" if z.imag >= 0 else "-"
    return f"{z.real:.6f} {sign} {abs(z.imag):.6f}j"


def tour(label: str, p: ModelParams):
    print(f"--- {label} ---")
    print(f"r0 = {compute_r0(p):.6f}")
    eq = solve_endemic(p)
    print(f"i_star = {eq.i_star:.9f}   phi = {eq.phi:.9f}")
    s1, e1, i1, r1 = eq.block1
    print(f"block 1 = ({s1:.6f}, {e1:.6e}, {i1:.6e}, {r1:.6f})")
    print(f"never-infected share of susceptibles: {s1 / eq.s_star:.4f}")

    for name, jac in (
        ("macro", jacobian_macro(p, eq)),
        ("block", jacobian_micro_block(p, eq)),
    ):
        eigs = eigenvalues_4x4(jac)
        stable = "stable" if all(z.real < 0 for z in eigs) else "one unstable direction"
        print(f"{name} spectrum (per year, {stable}):")
        for z in eigs:
            print(f"    {_show(z)}")
        if stable != "stable":
            # that eigenvalue is -(b - nu*i_star): it moves mass off the
            # unit simplex, where the fractions never live.  On the
            # simplex itself the remaining modes all contract.
            print("    (the positive mode is transverse to S+E+I+R = 1)")

    fate = classify_fate(p)
    print(f"population fate: case {fate.case}, {fate.outcome}")
    print()


def main():
    gamma = 1.0 / 14.0
    sigma = 1.0 / 7.0
    b = 1.0 / (76.0 * 365.0)
    preset = ModelParams(
        beta=3.0 * (gamma + b) * (sigma + b) / sigma,
        sigma=sigma, gamma=gamma, omega=1.0 / 365.0, b=b, mu=b,
    )
    tour("measles-like preset", preset)

    lethal = ModelParams(
        beta=80.0, sigma=52.0, gamma=26.0, omega=1.0,
        nu=2.0, b=0.013, mu=0.013, time_unit="per-year",
    )
    tour("lethal variant (nu = 2/yr)", lethal)
    print("with births exactly balancing natural deaths, any mortality the")
    print("infection adds tips the balance: the total population decays at")
    print("asymptotic rate nu * i_star")


if __name__ == "__main__":
    main()

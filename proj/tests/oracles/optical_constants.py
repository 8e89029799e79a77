"""Reference delta, beta and attenuation length from the shipped .nff tables.

Independent of the C++ code: numpy log-log interpolation of f1, f2 and the
textbook relation delta + i beta = r_e lambda^2 n_atoms (f1 + i f2) / (2 pi).
"""
import numpy as np

R_E = 2.8179403262e-15
HC_KEV_NM = 1.23984193
N_A = 6.02214076e23
MASS = {"C": 12.011, "Si": 28.0855, "Pt": 195.084}


def load(symbol):
    rows = np.loadtxt(f"data/{symbol.lower()}.nff", skiprows=1)
    return rows[rows[:, 1] > -9000]


def factors(symbol, e_kev):
    t = load(symbol)
    e = np.log(t[:, 0])
    x = np.log(e_kev * 1e3)
    with np.errstate(invalid="ignore"):
            return (np.exp(np.interp(x, e, np.log(t[:, 1]))),
                np.exp(np.interp(x, e, np.log(t[:, 2]))))


def constants(symbol, density, e_kev):
    f1, f2 = factors(symbol, e_kev)
    lam = HC_KEV_NM * 1e-9 / e_kev
    n = density * 1e6 / MASS[symbol] * N_A
    k = R_E * lam**2 * n / (2 * np.pi)
    delta, beta = k * f1, k * f2
    return delta, beta, lam / (4 * np.pi * beta)


if __name__ == "__main__":
    for sym, rho in (("Pt", 21.45), ("C", 2.26), ("Si", 2.33)):
        for e in (8.0, 10.5, 12.9):
            d, b, att = constants(sym, rho, e)
            print(f"{sym} {e:5.2f} keV  delta={d:.10e} beta={b:.10e} att_um={att*1e6:.6f}")

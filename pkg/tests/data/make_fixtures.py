"""Regenerate plane_wave.json from hand-written Dirac matrices (no package imports)."""
import json
import pathlib

import numpy as np

I2, Z2 = np.eye(2), np.zeros((2, 2))
PAULI = [np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.array([[1, 0], [0, -1]])]
GAMMA = np.array([np.block([[I2, Z2], [Z2, -I2]])] + [np.block([[Z2, s], [-s, Z2]]) for s in PAULI])
ETA = np.diag([1.0, -1.0, -1.0, -1.0])


def main():
    mass, charge = 1.25, 0.75
    p3 = np.array([0.3, -0.4, 0.5])
    p_up = np.concatenate([[np.sqrt(mass ** 2 + p3 @ p3)], p3])
    p_low = ETA @ p_up
    chi = np.array([0.6 + 0.1j, -0.2 + 0.3j, 0.4 - 0.5j, 0.1 + 0.2j])
    psi = (np.einsum("m,mab->ab", p_low, GAMMA) + mass * np.eye(4)) @ chi
    dpsi = -1j * p_low[:, None] * psi[None, :]
    j_up = np.real(np.einsum("a,ab,mbc,c->m", np.conj(psi), GAMMA[0], GAMMA, psi))
    j_low = ETA @ j_up
    theta = -0.5 * (np.outer(p_low, j_low) + np.outer(j_low, p_low))
    sigma = np.real(np.conj(psi) @ GAMMA[0] @ psi)
    data = {
        "psi": [[z.real, z.imag] for z in psi],
        "dpsi": [[[z.real, z.imag] for z in row] for row in dpsi],
        "A": [0.0] * 4,
        "dA": [0.0] * 16,
        "mass": mass,
        "charge": charge,
        "expected": {
            "p_lower": p_low.tolist(),
            "j_lower": j_low.tolist(),
            "belinfante": theta.tolist(),
            "lagrangian": float(p_up @ j_low - mass * sigma),
        },
    }
    out = pathlib.Path(__file__).with_name("plane_wave.json")
    out.write_text(json.dumps(data, indent=2) + "\n")


if __name__ == "__main__":
    main()

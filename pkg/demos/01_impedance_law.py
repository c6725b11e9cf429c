"""The joint impedance law and torque saturation.

The knee torque is a virtual spring-damper about an equilibrium angle:

    tau = -k * (theta - theta_eq) - b * theta_dot

clamped to the device limit (100 Nm by default). This script sweeps the
knee angle at a few stiffness settings and shows where the clamp engages.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from kneesim import DeviceSpec, ImpedanceParams, JointState, impedance_torque, saturate

OUT = __import__("pathlib").Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

spec = DeviceSpec()
thetas = np.linspace(0.0, 120.0, 500)

print("Spring-damper torque about theta_eq = 30 deg, theta_dot = 0:")
fig, ax = plt.subplots(figsize=(7, 4))
for k in (0.5, 2.0, 5.0):
    params = ImpedanceParams(k=k, b=0.0, theta_eq=30.0)
    raw = [impedance_torque(JointState(t, 0.0), params) for t in thetas]
    clamped = [saturate(tau, spec)[0] for tau in raw]
    ax.plot(thetas, clamped, label=f"k = {k} Nm/deg")
    at60 = impedance_torque(JointState(60.0, 0.0), params)
    print(f"  k={k:4.1f}: tau(60 deg) = {at60:7.1f} Nm"
          f"{'  (clamped to +/-100)' if abs(at60) > 100 else ''}")

ax.axhline(spec.torque_limit_nm, color="gray", ls="--", lw=0.8)
ax.axhline(-spec.torque_limit_nm, color="gray", ls="--", lw=0.8)
ax.set_xlabel("knee angle (deg)")
ax.set_ylabel("commanded torque (Nm)")
ax.set_title("Impedance torque vs angle, with the device clamp")
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "impedance_law.png", dpi=120)
print(f"\nA damping term resists motion: at theta = theta_eq, theta_dot = 200 deg/s,")
params = ImpedanceParams(k=2.0, b=0.05, theta_eq=30.0)
print(f"  tau = {impedance_torque(JointState(30.0, 200.0), params):.1f} Nm (pure -b*theta_dot)")
print(f"\nfigure: {OUT / 'impedance_law.png'}")

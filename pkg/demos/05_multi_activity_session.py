"""One session, five activities.

A scripted sequence of key-fob events walks the controller through level
ground, both ramps, and both stair directions. Mode switches are latched
and applied only at the next EarlyStance entry (full weight bearing), and
each activity shows its characteristic knee excursion: modest for level
walking, largest for stair ascent.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from pathlib import Path

from kneesim import scripted_session
from kneesim.config import default_session_config
from kneesim.core import Placement
from kneesim.session import load_script

HERE = Path(__file__).parent
OUT = HERE / "output"
OUT.mkdir(exist_ok=True)

cfg = default_session_config(Placement.ABOVE_KNEE)
script = load_script(HERE.parent / "configs" / "multi_activity_script.csv")
print("scripted key-fob events:")
for ev in script:
    print(f"  t={ev.t:5.1f} s  ->  {ev.mode.value}")

result = scripted_session(cfg, script=script, duration_s=62.0)
sl, st = result.sensor_log, result.state_log

switches = [(st.t[i], st.mode[i]) for i in range(len(st)) if st.event[i] == "mode_switch"]
print("\nmode switches landed at EarlyStance entries:")
for t, mode in switches:
    print(f"  t={t:6.2f} s  ->  {mode}")

print("\nknee range of motion per activity segment:")
bounds = [0.0] + [t for t, _ in switches] + [st.t[-1] + 0.004]
modes = [st.mode[0]] + [m for _, m in switches]
for mode, t0, t1 in zip(modes, bounds, bounds[1:]):
    mask = (sl.t >= t0 + 1.0) & (sl.t < t1)  # skip the settling step
    if mask.any():
        rom = sl.q[mask].max() - sl.q[mask].min()
        print(f"  {mode:<14} [{t0:5.1f}, {t1:5.1f}) s: ROM = {rom:5.1f} deg")

fig, ax = plt.subplots(figsize=(11, 4))
ax.plot(sl.t, sl.q, lw=0.8)
for t, mode in switches:
    ax.axvline(t, color="tab:red", lw=0.8, ls="--")
    ax.text(t + 0.3, 100, mode, rotation=90, fontsize=8, va="top")
ax.set_xlabel("time (s)")
ax.set_ylabel("knee angle (deg)")
ax.set_title("Knee angle across scripted activity switches")
fig.tight_layout()
fig.savefig(OUT / "multi_activity.png", dpi=120)
print(f"\nfigure: {OUT / 'multi_activity.png'}")

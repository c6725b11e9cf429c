"""Headless live-tuning session over the wire protocol.

Starts the `serve` loop in-process (time-scaled 10x), connects a WebSocket
client, and plays prosthetist: read the snapshot, stiffen early stance,
watch the acknowledged value reappear in telemetry, then key-fob to stair
ascent and observe the switch land at the next EarlyStance entry.

The browser console under frontend/ speaks exactly this protocol.
"""

import json
import threading
import time

from websockets.sync.client import connect

from kneesim.config import default_session_config
from kneesim.core import Placement
from kneesim.server import LiveSession

PORT = 8765
cfg = default_session_config(Placement.ABOVE_KNEE)
session = LiveSession(cfg, time_scale=10.0, duration_s=90.0)
ready = threading.Event()
thread = threading.Thread(
    target=session.run, kwargs=dict(host="127.0.0.1", port=PORT, ready=ready), daemon=True
)
thread.start()
ready.wait(5)
print(f"serve running on ws://127.0.0.1:{PORT} (simulated time 10x)\n")

with connect(f"ws://127.0.0.1:{PORT}") as ws:
    snapshot = json.loads(ws.recv(timeout=5))
    config_echo = snapshot["payload"]["config"]
    print(f"snapshot: placement={config_echo['placement']} "
          f"participant={config_echo['participant']['id']} "
          f"mode={snapshot['payload']['state']['mode']}")
    old_k = config_echo["impedance"]["cells"]["level_walk"]["early_stance"]["k"]
    print(f"early-stance stiffness from snapshot: k={old_k}")

    ws.send(json.dumps({
        "kind": "param_update", "seq": 1,
        "payload": {"activity": "level_walk", "phase": "early_stance",
                    "k": old_k + 1.5, "b": 0.06, "theta_eq": 10.0},
    }))
    while True:
        msg = json.loads(ws.recv(timeout=5))
        if msg.get("seq") == 1:
            print(f"{msg['kind']}: {msg['payload']}")
            break
    while True:
        msg = json.loads(ws.recv(timeout=5))
        if msg["kind"] == "telemetry" and msg["payload"]["phase"] == "early_stance":
            print(f"telemetry echoes active k={msg['payload']['active_params']['k']} "
                  f"at t={msg['t']:.2f} s")
            break

    ws.send(json.dumps({"kind": "mode_request", "seq": 2,
                        "payload": {"mode": "stair_ascent"}}))
    t_request = None
    while True:
        msg = json.loads(ws.recv(timeout=5))
        if msg.get("seq") == 2:
            t_request = msg["t"]
            print(f"\nkey fob acknowledged at t={t_request:.2f} s (simulated)")
            break
    while True:
        msg = json.loads(ws.recv(timeout=5))
        if msg["kind"] == "telemetry" and msg["payload"]["mode"] == "stair_ascent":
            print(f"switch visible at t={msg['t']:.2f} s in phase "
                  f"{msg['payload']['phase']} (the safe boundary)")
            break

session.stop()
thread.join(timeout=10)
print("\nsession stopped; logs stay deterministic regardless of observers")

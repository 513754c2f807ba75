"""Deterministic discrete-time simulator for delay-tolerant networks.

The package is organised as one module per subsystem:

* :mod:`dtnsim.geodata`  -- CSV/WKT ingestion, road graphs, bus routes
* :mod:`dtnsim.mobility` -- map-constrained waypoint travel and route traversal
* :mod:`dtnsim.simcore`  -- the tick engine: radio links, transfers, buffers
* :mod:`dtnsim.routing`  -- predictability-table, copy-token and flood routers
* :mod:`dtnsim.reports`  -- per-run report artifacts and seed averaging
* :mod:`dtnsim.harness`  -- scenario configs, single runs, parameter sweeps

Everything is reproducible: a scenario config plus a master seed determines
every random draw, every event and every output byte.
"""

__version__ = "0.1.0"

from lagoontwin.service.app import create_app
from lagoontwin.service.state import ServeState, StateHolder, build_snapshot

__all__ = ["ServeState", "StateHolder", "build_snapshot", "create_app"]

#!/usr/bin/env python3
"""
NSGA-III OJZJ experiments - HTTP API server
Serves the FastAPI backend with uvicorn
"""

import os
import sys
from pathlib import Path

# Add backend to path
sys.path.insert(0, str(Path(__file__).parent / "backend"))

import uvicorn

from app.main import app

if __name__ == "__main__":
    port = int(os.environ.get("PORT", 8000))

    uvicorn.run(
        app,
        host=os.environ.get("HOST", "127.0.0.1"),
        port=port,
        log_level=os.environ.get("NSGA3_LOG_LEVEL", "info").lower(),
    )

#!/usr/bin/env python3
"""
Alt Topology Tool

Sum capacity, schedules and decodability for partially connected wired networks
whose topology alternates between known states.

Usage:
    ./alt_topology.py capacity --scenario ic2 --lambda 1/3,1/3,1/3,0
    ./alt_topology.py simulate --scenario ic2 --lambda 1/4,1/4,1/4,1/4 --n 10000 --p 5
    ./alt_topology.py verify --builtin ic2-joint-abc --mode worst --p 3
    ./alt_topology.py search --users 2 --sequence A,B,C --p 3
    ./alt_topology.py find-examples --p 3
    ./alt_topology.py --json capacity --scenario bc2 --lambda 1/2,1/2,0,0
"""

import sys
import logging

from alt_topology import AltTopology, AltTopologyError


def main():
    """Main entry point"""
    try:
        app = AltTopology()
        sys.exit(app.run())
    except KeyboardInterrupt:
        print("\nOperation cancelled by user")
        sys.exit(1)
    except AltTopologyError as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(e.exit_code)
    except Exception as e:
        print(f"Error: {e}", file=sys.stderr)
        if logging.getLogger("alt-topology").level == logging.DEBUG:
            import traceback
            traceback.print_exc()
        sys.exit(1)


if __name__ == "__main__":
    main()

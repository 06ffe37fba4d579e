#!/usr/bin/env python3
"""Serves this directory on an ephemeral local port and opens the report."""

import functools
import http.server
import os
import threading
import webbrowser


def main():
    root = os.path.dirname(os.path.abspath(__file__))
    handler = functools.partial(http.server.SimpleHTTPRequestHandler, directory=root)
    server = http.server.ThreadingHTTPServer(("127.0.0.1", 0), handler)
    url = "http://127.0.0.1:%d/index.html" % server.server_address[1]
    print("Serving report at " + url + " (Ctrl+C to stop)")
    threading.Timer(0.5, lambda: webbrowser.open_new_tab(url)).start()
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()


if __name__ == "__main__":
    main()

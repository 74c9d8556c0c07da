#!/usr/bin/env python3
"""Run one pytest script and write a per-case JSON report.

Usage: run_pytest.py SCRIPT REPORT

REPORT is a JSON array of
  {"name", "outcome": "passed"|"failed"|"error", "message",
   "responses": [{"method", "path", "status", "body_digest"}]}

Every HTTP response received through requests is attached to the case
that was running. The report is rewritten after each case, so a killed run
still leaves the cases that finished; collected cases that never finished
are reported as errors.
"""

import hashlib
import json
import os
import sys
import urllib.parse

sys.dont_write_bytecode = True

import pytest  # noqa: E402
import requests  # noqa: E402


class Recorder:
    def __init__(self, report_path):
        self.report_path = report_path
        self.cases = {}
        self.current = None

    def write(self):
        tmp = self.report_path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(list(self.cases.values()), fh, indent=1)
        os.replace(tmp, self.report_path)

    def case(self, nodeid):
        name = nodeid.split("::", 1)[-1]
        if nodeid not in self.cases:
            self.cases[nodeid] = {"name": name, "outcome": "error", "message": "not finished", "responses": []}
        return self.cases[nodeid]

    def capture(self, method, url, status, body):
        if self.current is None:
            return
        self.case(self.current)["responses"].append({
            "method": (method or "").upper(),
            "path": urllib.parse.urlsplit(url).path or "/",
            "status": int(status),
            "body_digest": hashlib.sha256(body or b"").hexdigest(),
        })

    # pytest hooks

    def pytest_collection_modifyitems(self, items):
        for item in items:
            self.case(item.nodeid)
        self.write()

    def pytest_collectreport(self, report):
        if report.failed:
            entry = self.case(report.nodeid or "collection")
            entry["message"] = failure_text(report) or "collection failed"
            self.write()

    def pytest_runtest_logstart(self, nodeid, location):
        self.current = nodeid

    def pytest_runtest_logreport(self, report):
        entry = self.case(report.nodeid)
        if report.skipped:
            # A skipped case was not executed and is left out of the report.
            self.cases.pop(report.nodeid, None)
        elif report.when == "setup" and report.failed:
            entry["outcome"] = "error"
            entry["message"] = failure_text(report)
        elif report.when == "call":
            entry["outcome"] = "passed" if report.passed else "failed"
            entry["message"] = "" if report.passed else failure_text(report)
        elif report.when == "teardown" and report.failed and entry["outcome"] == "passed":
            entry["outcome"] = "error"
            entry["message"] = failure_text(report)
        self.write()

    def pytest_runtest_logfinish(self, nodeid, location):
        self.current = None


def failure_text(report, limit=2000):
    text = getattr(report, "longreprtext", "") or str(report.longrepr or "")
    errors = [line[1:].strip() for line in text.splitlines() if line.startswith("E ")]
    picked = "\n".join(errors) if errors else text.strip()
    return picked[:limit]


def main(argv):
    if len(argv) != 3:
        print("usage: run_pytest.py SCRIPT REPORT", file=sys.stderr)
        return 64
    script = os.path.abspath(argv[1])
    report = os.path.abspath(argv[2])
    recorder = Recorder(report)
    recorder.write()

    original_send = requests.Session.send

    def send(session, request, **kwargs):
        response = original_send(session, request, **kwargs)
        recorder.capture(request.method, request.url, response.status_code, response.content)
        return response

    requests.Session.send = send
    try:
        code = pytest.main(
            [script, "-p", "no:terminal", "-p", "no:cacheprovider", "--rootdir", os.path.dirname(script)],
            plugins=[recorder],
        )
    finally:
        requests.Session.send = original_send
        recorder.write()
    return int(code)


if __name__ == "__main__":
    sys.exit(main(sys.argv))

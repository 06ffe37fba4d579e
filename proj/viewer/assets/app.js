// Minimal read-only view over report.json.
(function () {
  "use strict";

  function el(tag, text) {
    const node = document.createElement(tag);
    if (text !== undefined) node.textContent = String(text);
    return node;
  }

  function fail(message) {
    const banner = document.getElementById("banner");
    banner.textContent = message;
    banner.hidden = false;
    document.getElementById("app").hidden = true;
  }

  function row(table, cells) {
    const tr = el("tr");
    cells.forEach((c) => {
      const td = el("td");
      if (c instanceof Node) td.appendChild(c); else td.textContent = String(c);
      tr.appendChild(td);
    });
    table.appendChild(tr);
  }

  function showSource(test, target) {
    fetch(test.file)
      .then((r) => { if (!r.ok) throw new Error(r.status); return r.text(); })
      .then((text) => {
        const lines = text.split("\n").slice(test.start_line - 1, test.end_line);
        target.textContent = lines.join("\n");
      })
      .catch(() => { target.textContent = "(source file unavailable: " + test.file + ")"; });
  }

  function render(report) {
    const summary = document.getElementById("summary");
    const table = el("table");
    row(table, ["Tool", report.tool_name + " " + report.tool_version]);
    row(table, ["Created", report.creation_time]);
    const rest = report.problem_details && report.problem_details.rest;
    row(table, ["Endpoints", rest ? rest.endpoint_count : 0]);
    row(table, ["Tests", report.total_tests]);
    row(table, ["Faults", report.faults.length]);
    summary.appendChild(table);

    const endpoints = document.getElementById("endpoints");
    endpoints.appendChild(el("h2", "Endpoints"));
    const etable = el("table");
    row(etable, ["Endpoint", "Statuses", "Fault codes"]);
    (rest ? rest.endpoints : []).forEach((e) => {
      const badges = el("span");
      e.observed_statuses.forEach((s) => {
        const b = el("span", s);
        b.className = "badge s" + String(s)[0];
        badges.appendChild(b);
      });
      row(etable, [e.identity, badges, e.fault_codes.join(", ")]);
    });
    endpoints.appendChild(etable);

    const tests = document.getElementById("tests");
    tests.appendChild(el("h2", "Tests"));
    report.test_cases.forEach((t) => {
      const details = el("details");
      details.appendChild(el("summary", t.name + " (" + t.file + ":" + t.start_line + "-" + t.end_line + ")"));
      const pre = el("pre");
      details.addEventListener("toggle", () => { if (details.open && !pre.textContent) showSource(t, pre); });
      details.appendChild(pre);
      tests.appendChild(details);
    });
  }

  fetch("report.json")
    .then((r) => { if (!r.ok) throw new Error("HTTP " + r.status); return r.json(); })
    .then((report) => {
      if (!report || !Array.isArray(report.faults) || !Array.isArray(report.test_cases)) {
        throw new Error("report.json does not match the report schema");
      }
      render(report);
    })
    .catch((e) => fail("Cannot load report.json: " + e.message));
})();

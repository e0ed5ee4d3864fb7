import { describe, expect, it } from "vitest";

import { buildChart, esc, fmtTick, logTicks, niceTicks } from "../src/chart.js";

describe("ticks", () => {
  it("nice linear ticks land on round steps", () => {
    expect(niceTicks(0, 10, 6)).toEqual([0, 2, 4, 6, 8, 10]);
    expect(niceTicks(0, 1, 6)).toEqual([0, 0.2, 0.4, 0.6, 0.8, 1].map((v) => expect.closeTo(v, 10)));
  });

  it("log ticks are decades inside the range", () => {
    expect(logTicks(1e-14, 1e-10).map((t) => Math.round(Math.log10(t))))
      .toEqual([-14, -13, -12, -11, -10]);
    expect(logTicks(2e-5, 3e-1).every((t) => t >= 1e-5 && t <= 1)).toBe(true);
  });

  it("tick labels stay compact", () => {
    expect(fmtTick(16)).toBe("16");
    expect(fmtTick(1e-12)).toBe("1e-12");
    expect(fmtTick(0.0078125)).toBe("7.81e-3");
    expect(fmtTick(0)).toBe("0");
  });
});

describe("buildChart", () => {
  const base = {
    title: "drift & decay",
    x: { label: "N", log: true },
    y: { label: "sup", log: true },
    series: [{
      xs: [4, 8, 16, 32],
      ys: [4e-11, 2e-11, 1e-11, 5e-12],
      label: "sup |dE1|",
      color: "#3b6fb6",
    }],
  };

  it("emits a self-contained svg with escaped text", () => {
    const svg = buildChart(base);
    expect(svg.startsWith("<svg ")).toBe(true);
    expect(svg.endsWith("</svg>")).toBe(true);
    expect(svg).toContain("drift &amp; decay");
    expect(svg).toContain("<polyline");
    expect(svg).not.toContain("NaN");
  });

  it("drops nonpositive points on log axes instead of breaking", () => {
    const svg = buildChart({
      ...base,
      series: [{ ...base.series[0], ys: [4e-11, 0, 1e-11, 5e-12] }],
    });
    expect(svg).not.toContain("NaN");
    const circles = svg.match(/<circle/g) ?? [];
    expect(circles).toHaveLength(3);
  });

  it("draws annotations and rules when asked", () => {
    const svg = buildChart({
      ...base,
      x: { label: "ratio" },
      y: { label: "count" },
      series: [{ xs: [0, 1, 2, 3], ys: [5, 9, 2], kind: "step" as const,
                 label: "N=4", color: "#c0392b" }],
      rulesX: [{ x: 2.5, color: "#c0392b", label: "sup N=4" }],
      annotations: ["sup(N=4) = 0.0569"],
    });
    expect(svg).toContain("sup(N=4) = 0.0569");
    expect(svg).toContain("stroke-dasharray");
    expect(svg).toContain("sup N=4");
  });

  it("escapes hostile characters everywhere", () => {
    expect(esc("<b>&\"x\"")).toBe("&lt;b&gt;&amp;&quot;x&quot;");
    const svg = buildChart({ ...base, title: "<script>" });
    expect(svg).not.toContain("<script>");
  });
});

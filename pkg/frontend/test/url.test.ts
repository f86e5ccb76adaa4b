import { describe, expect, it } from "vitest";

import { parseViewUrl, serializeViewUrl, STATE_DEFAULTS, type ViewState } from "../src/url.js";

describe("view URL grammar", () => {
  it("parses the documented link shape", () => {
    const state = parseViewUrl("?dataset=wfgh#time=absolute&artifact=last&color=year");
    expect(state.dataset).toBe("wfgh");
    expect(state.time).toBe("absolute");
    expect(state.criterion).toBe("last");
    expect(state.color).toEqual({ kind: "year" });
  });

  it("accepts normage as an alias and constant colors", () => {
    const state = parseViewUrl("?dataset=oas#time=normage&artifact=age&color=%23000");
    expect(state.time).toBe("normtime");
    expect(state.color.kind).toBe("constant");
  });

  it("falls back to bundle defaults for missing keys", () => {
    const state = parseViewUrl("?dataset=d#", { artifact: "mid", color: "ext" });
    expect(state.criterion).toBe("mid");
    expect(state.color.kind).toBe("ext");
    expect(state.time).toBe(STATE_DEFAULTS.time);
  });

  it("ignores unknown keys and rejects unknown values", () => {
    expect(parseViewUrl("?dataset=d&utm=1#wat=2&time=relend").time).toBe("relend");
    expect(() => parseViewUrl("?dataset=d#time=diagonal")).toThrow(/time/);
    expect(() => parseViewUrl("?dataset=d#color=rainbow")).toThrow(/color/);
  });

  it("round-trips every reachable state", () => {
    let seed = 777;
    const rand = () => {
      seed = (seed * 1103515245 + 12345) & 0x7fffffff;
      return seed / 0x7fffffff;
    };
    const pick = <T,>(items: T[]): T => items[Math.floor(rand() * items.length) % items.length];
    for (let i = 0; i < 100; i++) {
      const state: ViewState = {
        dataset: pick(["wfgh", "oas5", "postgres"]),
        time: pick(["absolute", "relstart", "relend", "relmedian", "normtime"]),
        criterion: pick(["path", "first", "last", "mid", "age", "similarity", "size_delta"]),
        color: pick([
          { kind: "year" },
          { kind: "ext" },
          { kind: "author" },
          { kind: "metric", metric: "size" },
          { kind: "delta", metric: "size" },
          { kind: "constant", constant: "#112233" },
        ] as ViewState["color"][]),
        density: rand() < 0.5,
        alpha: pick([0.05, 0.2, 1]),
        radius: pick([1, 2, 3]),
        transitionMs: pick([0, 400, 1500]),
      };
      expect(parseViewUrl(serializeViewUrl(state))).toEqual(state);
    }
  });
});

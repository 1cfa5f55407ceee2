import assert from "node:assert/strict";
import { test } from "node:test";

import {
  PALETTE,
  brushToRange,
  colorFor,
  edgeStyle,
  ringSectors,
  sectorPath,
  termFontSize,
  timelineScale,
} from "../src/viewmodel.js";
import { initialState, onVersionChange, setBrush, toggleContext } from "../src/state.js";

test("palette indexes by ordinal mod 10", () => {
  assert.equal(colorFor(0), PALETTE[0]);
  assert.equal(colorFor(9), PALETTE[9]);
  assert.equal(colorFor(10), PALETTE[0]);
  assert.equal(colorFor(23), PALETTE[3]);
});

test("brushToRange maps pixels to inclusive clamped indices", () => {
  assert.deepEqual(brushToRange(0, 99, 100, 10), [0, 9]);
  assert.deepEqual(brushToRange(50, 50, 100, 10), [5, 5]);
  assert.deepEqual(brushToRange(99, 0, 100, 10), [0, 9]); // reversed drag
  assert.deepEqual(brushToRange(-20, 500, 100, 10), [0, 9]); // out of strip
  assert.deepEqual(brushToRange(0, 50, 100, 0), [0, 0]); // empty conversation
});

test("ring sectors cover the full circle proportionally to similarity", () => {
  const sectors = ringSectors([
    { key: "a", s: 0.6 },
    { key: "b", s: 0.3 },
  ]);
  assert.equal(sectors.length, 2);
  const spans = sectors.map((s) => s.endAngle - s.startAngle);
  const total = spans.reduce((x, y) => x + y, 0);
  assert.ok(Math.abs(total - 2 * Math.PI) < 1e-9);
  // 0.6 vs 0.3 -> 2:1 angle ratio
  assert.ok(Math.abs(spans[0]! / spans[1]! - 2) < 1e-9);
});

test("ring sectors give non-positive similarities a sliver, not a hole", () => {
  const sectors = ringSectors([
    { key: "a", s: 0.9 },
    { key: "b", s: -0.2 },
  ]);
  const spanB = sectors[1]!.endAngle - sectors[1]!.startAngle;
  assert.ok(spanB > 0);
  assert.ok(spanB < 0.1);
});

test("single-sector ring draws a full circle path", () => {
  const [sector] = ringSectors([{ key: "only", s: 0.7 }]);
  const path = sectorPath(0, 0, 10, sector!);
  assert.match(path, /^M 0 -10 A 10 10/);
});

test("edge style grows with similarity", () => {
  const weak = edgeStyle(0.1);
  const strong = edgeStyle(0.9);
  assert.ok(strong.width > weak.width);
  assert.ok(strong.opacity > weak.opacity);
  assert.deepEqual(edgeStyle(2), edgeStyle(1)); // clamped
});

test("term font size scales with relative weight", () => {
  assert.ok(termFontSize(1, 1) > termFontSize(0.2, 1));
  assert.equal(termFontSize(0.5, 0), 11); // degenerate max
});

test("timeline scale spans the margin box", () => {
  const scale = timelineScale(10, 3, 100, 60, 10);
  assert.equal(scale.x(0), 10);
  assert.equal(scale.x(9), 90);
  assert.equal(scale.y(0), 10);
  assert.equal(scale.y(2), 50);
});

test("setBrush clamps to [0, nodeCount)", () => {
  const state = initialState("c1");
  state.nodeCount = 5;
  setBrush(state, -3, 99);
  assert.deepEqual(state.brush, [0, 4]);
  setBrush(state, 3, 1);
  assert.deepEqual(state.brush, [1, 3]);
});

test("toggleContext adds then removes", () => {
  const state = initialState("c1");
  toggleContext(state, "n1");
  toggleContext(state, "n2");
  assert.deepEqual(state.contextList, ["n1", "n2"]);
  toggleContext(state, "n1");
  assert.deepEqual(state.contextList, ["n2"]);
});

test("onVersionChange drops vanished context ids and reclamps", () => {
  const state = initialState("c1");
  state.nodeCount = 6;
  state.contextList = ["n0", "n9"];
  state.selectedNode = "n9";
  setBrush(state, 0, 5);
  onVersionChange(state, 3, new Set(["n0", "n1", "n2"]), 3);
  assert.equal(state.analysisVersion, 3);
  assert.deepEqual(state.contextList, ["n0"]);
  assert.equal(state.selectedNode, null);
  assert.deepEqual(state.brush, [0, 2]);
});

import { Table, column } from "./csv";
import { linearScale } from "./scale";
import { document as svgDocument, el, points, px, text } from "./svg";

export const TRAJECTORY_COLUMNS = ["t", "x", "y", "z", "u"];

export interface TrajectoryData {
    t: number[];
    x: number[];
    z: number[];
    u: number[];
}

export function trajectoryFromTable(table: Table): TrajectoryData {
    const data = {
        t: column(table, "t"),
        x: column(table, "x"),
        z: column(table, "z"),
        u: column(table, "u"),
    };
    if (data.t.length < 2) {
        throw new Error("trajectory has no samples");
    }
    return data;
}

function splitAtOnset(traj: TrajectoryData): number {
    // first sample with t >= 0: control onset
    const i = traj.t.findIndex(t => t >= 0);
    return i < 0 ? traj.t.length : i;
}

/** The x-z phase portrait; warmup gray, controlled window colored. */
export function renderPhase(traj: TrajectoryData, width = 560, height = 560): string {
    const margin = 46;
    const xScale = linearScale(Math.min(...traj.x), Math.max(...traj.x), margin, width - margin);
    const zScale = linearScale(Math.min(...traj.z), Math.max(...traj.z), height - margin, margin);
    const onset = splitAtOnset(traj);
    const body: string[] = [];
    body.push(el("rect", { x: margin, y: margin, width: width - 2 * margin, height: height - 2 * margin, fill: "none", stroke: "#333333" }));
    if (onset > 1) {
        body.push(el("polyline", {
            points: points(traj.x.slice(0, onset + 1).map(v => xScale.map(v)),
                           traj.z.slice(0, onset + 1).map(v => zScale.map(v))),
            fill: "none", stroke: "#b9c0c7", "stroke-width": 1,
        }));
    }
    body.push(el("polyline", {
        points: points(traj.x.slice(onset).map(v => xScale.map(v)),
                       traj.z.slice(onset).map(v => zScale.map(v))),
        fill: "none", stroke: "#d95f02", "stroke-width": 1.2,
    }));
    body.push(text("x", { x: width / 2, y: height - 12, "text-anchor": "middle", "font-size": 12 }));
    body.push(text("z", { x: 14, y: height / 2, "text-anchor": "middle", "font-size": 12, transform: `rotate(-90 14 ${height / 2})` }));
    return svgDocument(width, height, body);
}

/** x against time with the control-onset marker at t = 0; the control
 *  input is drawn along the bottom of the same axes. */
export function renderTrace(traj: TrajectoryData, width = 760, height = 340): string {
    const margin = { left: 52, right: 16, top: 16, bottom: 40 };
    const tScale = linearScale(traj.t[0], traj.t[traj.t.length - 1], margin.left, width - margin.right);
    const lo = Math.min(Math.min(...traj.x), Math.min(...traj.u));
    const hi = Math.max(Math.max(...traj.x), Math.max(...traj.u));
    const yScale = linearScale(lo, hi, height - margin.bottom, margin.top);
    const body: string[] = [];
    for (const tick of tScale.ticks()) {
        const x = tScale.map(tick.value);
        body.push(text(tick.label, { x: px(x), y: height - margin.bottom + 16, "text-anchor": "middle", "font-size": 11 }));
    }
    for (const tick of yScale.ticks()) {
        const y = yScale.map(tick.value);
        body.push(el("line", { x1: margin.left, x2: width - margin.right, y1: px(y), y2: px(y), stroke: "#eeeeee" }));
        body.push(text(tick.label, { x: margin.left - 6, y: px(y + 4), "text-anchor": "end", "font-size": 11 }));
    }
    body.push(el("rect", { x: margin.left, y: margin.top, width: width - margin.left - margin.right, height: height - margin.top - margin.bottom, fill: "none", stroke: "#333333" }));
    // control onset marker
    if (traj.t[0] < 0 && traj.t[traj.t.length - 1] > 0) {
        const x0 = tScale.map(0);
        body.push(el("line", { x1: px(x0), x2: px(x0), y1: margin.top, y2: height - margin.bottom, stroke: "#222222", "stroke-dasharray": "5 4" }));
        body.push(text("control on", { x: px(x0 + 4), y: margin.top + 12, "font-size": 10, fill: "#222222" }));
    }
    body.push(el("polyline", { points: points(traj.t.map(v => tScale.map(v)), traj.u.map(v => yScale.map(v))), fill: "none", stroke: "#9aa5ad", "stroke-width": 0.8 }));
    body.push(el("polyline", { points: points(traj.t.map(v => tScale.map(v)), traj.x.map(v => yScale.map(v))), fill: "none", stroke: "#1f6fb2", "stroke-width": 1.4 }));
    body.push(text("t", { x: (margin.left + width - margin.right) / 2, y: height - 8, "text-anchor": "middle", "font-size": 12 }));
    body.push(text("x, u", { x: 14, y: height / 2, "text-anchor": "middle", "font-size": 12, transform: `rotate(-90 14 ${height / 2})` }));
    return svgDocument(width, height, body);
}

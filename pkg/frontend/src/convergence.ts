import { Table, column } from "./csv";
import { Scale, linearScale, logScale } from "./scale";
import { PALETTE, document as svgDocument, el, points, px, text } from "./svg";

export interface ConvergenceSeries {
    label: string;
    generation: number[];
    mean: number[];
    min: number[];
    max: number[];
}

export interface ConvergenceOptions {
    logAxis: boolean;
    reference?: number;
    width?: number;
    height?: number;
}

export const AGGREGATE_COLUMNS = ["generation", "mean_best", "min_best", "max_best", "std_best"];

export function seriesFromTable(label: string, table: Table): ConvergenceSeries {
    return {
        label,
        generation: column(table, "generation"),
        mean: column(table, "mean_best"),
        min: column(table, "min_best"),
        max: column(table, "max_best"),
    };
}

/** Mean curve with a min/max band per series, log cost axis by default. */
export function renderConvergence(series: ConvergenceSeries[], options: ConvergenceOptions): string {
    if (series.length === 0) {
        throw new Error("no input series");
    }
    const width = options.width ?? 720;
    const height = options.height ?? 460;
    const margin = { left: 70, right: 20, top: 20, bottom: 46 };

    const allValues: number[] = [];
    let maxGen = 0;
    for (const s of series) {
        if (s.generation.length === 0) {
            throw new Error(`series '${s.label}' has no rows`);
        }
        allValues.push(...s.mean, ...s.min, ...s.max);
        maxGen = Math.max(maxGen, s.generation[s.generation.length - 1]);
    }
    if (options.reference !== undefined) {
        allValues.push(options.reference);
    }

    let yScale: Scale;
    let clampFloor = -Infinity;
    if (options.logAxis) {
        const positive = allValues.filter(v => v > 0);
        if (positive.length === 0) {
            throw new Error("log axis requires at least one positive value");
        }
        // nonpositive samples (converged-to-zero costs) are clamped to half
        // the smallest positive value so curves stay drawable
        clampFloor = Math.min(...positive) / 2;
        yScale = logScale(clampFloor, Math.max(...positive),
                          height - margin.bottom, margin.top);
    } else {
        yScale = linearScale(Math.min(...allValues), Math.max(...allValues),
                             height - margin.bottom, margin.top);
    }
    const xScale = linearScale(0, maxGen, margin.left, width - margin.right);
    const clamp = (v: number) => (v < clampFloor ? clampFloor : v);

    const body: string[] = [];
    // axes and grid
    for (const tick of yScale.ticks()) {
        const y = yScale.map(tick.value);
        body.push(el("line", { x1: margin.left, x2: width - margin.right, y1: px(y), y2: px(y), stroke: "#dddddd" }));
        body.push(text(tick.label, { x: margin.left - 8, y: px(y + 4), "text-anchor": "end", "font-size": 11 }));
    }
    for (const tick of xScale.ticks()) {
        const x = xScale.map(tick.value);
        body.push(el("line", { x1: px(x), x2: px(x), y1: margin.top, y2: height - margin.bottom, stroke: "#eeeeee" }));
        body.push(text(tick.label, { x: px(x), y: height - margin.bottom + 16, "text-anchor": "middle", "font-size": 11 }));
    }
    body.push(el("rect", {
        x: margin.left, y: margin.top,
        width: width - margin.left - margin.right,
        height: height - margin.top - margin.bottom,
        fill: "none", stroke: "#333333",
    }));
    body.push(text("generations", { x: (margin.left + width - margin.right) / 2, y: height - 10, "text-anchor": "middle", "font-size": 12 }));
    body.push(text("best cost", { x: 14, y: (margin.top + height - margin.bottom) / 2, "font-size": 12, transform: `rotate(-90 14 ${(margin.top + height - margin.bottom) / 2})`, "text-anchor": "middle" }));

    if (options.reference !== undefined && (!options.logAxis || options.reference > 0)) {
        const y = yScale.map(clamp(options.reference));
        body.push(el("line", {
            x1: margin.left, x2: width - margin.right, y1: px(y), y2: px(y),
            stroke: "#222222", "stroke-dasharray": "6 4",
        }));
    }

    series.forEach((s, i) => {
        const color = PALETTE[i % PALETTE.length];
        const xs = s.generation.map(g => xScale.map(g));
        const upper = s.max.map(v => yScale.map(clamp(v)));
        const lower = s.min.map(v => yScale.map(clamp(v)));
        const bandX = xs.concat([...xs].reverse());
        const bandY = upper.concat([...lower].reverse());
        body.push(el("polygon", { points: points(bandX, bandY), fill: color, "fill-opacity": 0.18, stroke: "none" }));
        body.push(el("polyline", {
            points: points(xs, s.mean.map(v => yScale.map(clamp(v)))),
            fill: "none", stroke: color, "stroke-width": 1.8,
        }));
    });

    // legend, top right
    series.forEach((s, i) => {
        const color = PALETTE[i % PALETTE.length];
        const y = margin.top + 16 + 16 * i;
        const x = width - margin.right - 150;
        body.push(el("line", { x1: x, x2: x + 22, y1: y - 4, y2: y - 4, stroke: color, "stroke-width": 2 }));
        body.push(text(s.label, { x: x + 28, y: y, "font-size": 12 }));
    });

    return svgDocument(width, height, body);
}

#!/usr/bin/env node
/** Plotting CLI for campaign CSV artifacts.
 *
 *   plot convergence --out FILE [--log|--linear] [--ref LEVEL]
 *                    [--labels a,b,...] [--overwrite] AGGREGATE_CSV...
 *   plot lorenz      --out PREFIX [--overwrite] TRAJECTORY_CSV
 *
 * Convergence reads the aggregate schema (generation,mean_best,min_best,
 * max_best,std_best) and draws one mean curve with a min/max band per
 * input, log cost axis by default. Lorenz reads t,x,y,z,u and writes
 * PREFIX_phase.svg and PREFIX_trace.svg. Existing outputs are never
 * overwritten unless --overwrite is passed.
 */

import { existsSync, writeFileSync } from "fs";
import { basename } from "path";

import { AGGREGATE_COLUMNS, renderConvergence, seriesFromTable } from "./convergence";
import { readTable } from "./csv";
import { TRAJECTORY_COLUMNS, renderPhase, renderTrace, trajectoryFromTable } from "./lorenz";

interface Args {
    command: string;
    out: string;
    log: boolean;
    linear: boolean;
    overwrite: boolean;
    reference?: number;
    labels?: string[];
    inputs: string[];
}

function parseArgs(argv: string[]): Args {
    if (argv.length === 0) {
        throw new Error("usage: plot convergence|lorenz --out FILE [options] INPUTS...");
    }
    const args: Args = {
        command: argv[0], out: "", log: false, linear: false,
        overwrite: false, inputs: [],
    };
    for (let i = 1; i < argv.length; i++) {
        const a = argv[i];
        if (a === "--out") {
            args.out = argv[++i] ?? "";
        } else if (a === "--log") {
            args.log = true;
        } else if (a === "--linear") {
            args.linear = true;
        } else if (a === "--overwrite") {
            args.overwrite = true;
        } else if (a === "--ref") {
            const v = Number(argv[++i]);
            if (!Number.isFinite(v)) throw new Error("--ref expects a number");
            args.reference = v;
        } else if (a === "--labels") {
            args.labels = (argv[++i] ?? "").split(",").map(s => s.trim()).filter(s => s.length > 0);
        } else if (a.startsWith("--")) {
            throw new Error(`unknown option '${a}'`);
        } else {
            args.inputs.push(a);
        }
    }
    if (!args.out) throw new Error("--out is required");
    if (args.inputs.length === 0) throw new Error("at least one input CSV is required");
    return args;
}

function defaultLabel(path: string): string {
    return basename(path).replace(/\.csv$/i, "").replace(/_aggregate$/i, "");
}

function writeOutput(path: string, content: string, overwrite: boolean): void {
    if (!overwrite && existsSync(path)) {
        throw new Error(`refusing to overwrite ${path} (pass --overwrite)`);
    }
    writeFileSync(path, content);
}

function runConvergence(args: Args): string[] {
    if (args.labels && args.labels.length !== args.inputs.length) {
        throw new Error(`got ${args.labels.length} labels for ${args.inputs.length} inputs`);
    }
    const series = args.inputs.map((path, i) => seriesFromTable(
        args.labels ? args.labels[i] : defaultLabel(path),
        readTable(path, AGGREGATE_COLUMNS)));
    const svg = renderConvergence(series, {
        logAxis: args.linear ? false : true,  // log by default
        reference: args.reference,
    });
    writeOutput(args.out, svg, args.overwrite);
    return [args.out];
}

function runLorenz(args: Args): string[] {
    if (args.inputs.length !== 1) {
        throw new Error("lorenz takes exactly one trajectory CSV");
    }
    const traj = trajectoryFromTable(readTable(args.inputs[0], TRAJECTORY_COLUMNS));
    const prefix = args.out.replace(/\.svg$/i, "");
    const phasePath = `${prefix}_phase.svg`;
    const tracePath = `${prefix}_trace.svg`;
    const phase = renderPhase(traj);
    const trace = renderTrace(traj);
    writeOutput(phasePath, phase, args.overwrite);
    writeOutput(tracePath, trace, args.overwrite);
    return [phasePath, tracePath];
}

export function main(argv: string[]): number {
    try {
        const args = parseArgs(argv);
        let written: string[];
        if (args.command === "convergence") {
            written = runConvergence(args);
        } else if (args.command === "lorenz") {
            written = runLorenz(args);
        } else {
            throw new Error(`unknown command '${args.command}' (use convergence or lorenz)`);
        }
        for (const path of written) {
            process.stdout.write(`wrote ${path}\n`);
        }
        return 0;
    } catch (err) {
        process.stderr.write(`error: ${err instanceof Error ? err.message : String(err)}\n`);
        return 1;
    }
}

if (require.main === module) {
    process.exit(main(process.argv.slice(2)));
}

import { existsSync, mkdtempSync, readFileSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { main } from "../src/plot";

let stderrLines: string[] = [];

beforeEach(() => {
    stderrLines = [];
    vi.spyOn(process.stdout, "write").mockImplementation(() => true);
    vi.spyOn(process.stderr, "write").mockImplementation((chunk: any) => {
        stderrLines.push(String(chunk));
        return true;
    });
});

afterEach(() => {
    vi.restoreAllMocks();
});

function tempDir(): string {
    return mkdtempSync(join(tmpdir(), "pbopt-plot-"));
}

function writeAggregate(dir: string, name: string, scale: number): string {
    const lines = ["generation,mean_best,min_best,max_best,std_best"];
    for (let g = 0; g < 30; g++) {
        const mean = scale * Math.exp(-0.3 * g);
        lines.push(`${g},${mean},${mean / 2},${mean * 2},${mean / 4}`);
    }
    const path = join(dir, name);
    writeFileSync(path, lines.join("\n") + "\n");
    return path;
}

function writeTrajectory(dir: string): string {
    const lines = ["t,x,y,z,u"];
    for (let i = 0; i <= 600; i++) {
        const t = -5 + i * 0.05;
        const x = 10 * Math.cos(0.2 * i) * Math.exp(-0.001 * i);
        lines.push(`${t},${x},${x * 0.8},${25 + 5 * Math.sin(0.2 * i)},${t >= 0 ? 0.3 : 0}`);
    }
    const path = join(dir, "traj.csv");
    writeFileSync(path, lines.join("\n") + "\n");
    return path;
}

describe("plot convergence", () => {
    it("emits a figure with four labeled curves and bands", () => {
        const dir = tempDir();
        const inputs = ["ppo1", "es", "cmaes", "pbo"].map(
            (name, i) => writeAggregate(dir, `parabola_${name}_aggregate.csv`, i + 1));
        const out = join(dir, "conv.svg");
        expect(main(["convergence", "--log", "--out", out, ...inputs])).toBe(0);
        const svg = readFileSync(out, "utf8");
        expect(svg.startsWith("<svg")).toBe(true);
        expect(svg.length).toBeGreaterThan(1000);
        expect((svg.match(/<polygon/g) ?? []).length).toBe(4);
        for (const label of ["parabola_ppo1", "parabola_es", "parabola_cmaes", "parabola_pbo"]) {
            expect(svg).toContain(label);
        }
    });

    it("honors --labels and --ref", () => {
        const dir = tempDir();
        const a = writeAggregate(dir, "a_aggregate.csv", 1);
        const out = join(dir, "c.svg");
        expect(main(["convergence", "--out", out, "--labels", "mine",
                     "--ref", "0.5", a])).toBe(0);
        const svg = readFileSync(out, "utf8");
        expect(svg).toContain(">mine</text>");
        expect(svg).toContain("stroke-dasharray");
    });

    it("fails cleanly on schema mismatch, naming the column", () => {
        const dir = tempDir();
        const bad = join(dir, "bad.csv");
        writeFileSync(bad, "generation,gen_best,best_so_far\n0,1,1\n");
        const out = join(dir, "x.svg");
        expect(main(["convergence", "--out", out, bad])).toBe(1);
        expect(stderrLines.join("")).toMatch(/mean_best/);
        expect(existsSync(out)).toBe(false);
    });

    it("refuses to overwrite without the flag", () => {
        const dir = tempDir();
        const a = writeAggregate(dir, "a_aggregate.csv", 1);
        const out = join(dir, "c.svg");
        expect(main(["convergence", "--out", out, a])).toBe(0);
        expect(main(["convergence", "--out", out, a])).toBe(1);
        expect(stderrLines.join("")).toMatch(/overwrite/);
        expect(main(["convergence", "--out", out, "--overwrite", a])).toBe(0);
    });
});

describe("plot lorenz", () => {
    it("emits phase and trace figures", () => {
        const dir = tempDir();
        const traj = writeTrajectory(dir);
        const out = join(dir, "lorenz");
        expect(main(["lorenz", "--out", out, traj])).toBe(0);
        for (const suffix of ["_phase.svg", "_trace.svg"]) {
            const path = out + suffix;
            expect(existsSync(path)).toBe(true);
            const svg = readFileSync(path, "utf8");
            expect(svg.startsWith("<svg")).toBe(true);
            expect(svg.length).toBeGreaterThan(500);
        }
    });

    it("errors on an empty trajectory and writes nothing", () => {
        const dir = tempDir();
        const empty = join(dir, "empty.csv");
        writeFileSync(empty, "t,x,y,z,u\n");
        const out = join(dir, "lorenz");
        expect(main(["lorenz", "--out", out, empty])).toBe(1);
        expect(existsSync(out + "_phase.svg")).toBe(false);
        expect(existsSync(out + "_trace.svg")).toBe(false);
    });

    it("takes exactly one input", () => {
        const dir = tempDir();
        const traj = writeTrajectory(dir);
        expect(main(["lorenz", "--out", join(dir, "o"), traj, traj])).toBe(1);
        expect(stderrLines.join("")).toMatch(/exactly one/);
    });
});

describe("argument handling", () => {
    it("rejects unknown commands and options", () => {
        expect(main(["scatter", "--out", "x.svg", "a.csv"])).toBe(1);
        expect(main(["convergence", "--out", "x.svg", "--bogus", "a.csv"])).toBe(1);
    });

    it("requires --out and inputs", () => {
        expect(main(["convergence"])).toBe(1);
        expect(main(["convergence", "--out", "x.svg"])).toBe(1);
    });
});

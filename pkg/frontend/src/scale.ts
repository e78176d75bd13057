export interface Tick {
    value: number;
    label: string;
}

export interface Scale {
    map(value: number): number;
    ticks(): Tick[];
}

function niceStep(span: number, target: number): number {
    const raw = span / target;
    const power = Math.pow(10, Math.floor(Math.log10(raw)));
    for (const m of [1, 2, 5, 10]) {
        if (m * power >= raw) return m * power;
    }
    return 10 * power;
}

export function linearScale(lo: number, hi: number, pixLo: number, pixHi: number): Scale {
    if (hi === lo) {
        hi = lo + 1;
    }
    const map = (v: number) => pixLo + ((v - lo) / (hi - lo)) * (pixHi - pixLo);
    return {
        map,
        ticks() {
            const step = niceStep(hi - lo, 5);
            const out: Tick[] = [];
            for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-12 * Math.abs(hi); v += step) {
                const rounded = Math.abs(v) < step / 1e9 ? 0 : v;
                out.push({ value: rounded, label: formatNumber(rounded) });
            }
            return out;
        },
    };
}

/** Log scale over positive values with decade ticks. */
export function logScale(lo: number, hi: number, pixLo: number, pixHi: number): Scale {
    if (lo <= 0 || hi <= 0) {
        throw new Error("log scale requires positive bounds");
    }
    if (hi === lo) {
        hi = lo * 10;
    }
    const llo = Math.log10(lo);
    const lhi = Math.log10(hi);
    const map = (v: number) => pixLo + ((Math.log10(v) - llo) / (lhi - llo)) * (pixHi - pixLo);
    return {
        map,
        ticks() {
            const out: Tick[] = [];
            let stride = 1;
            while ((Math.ceil(lhi) - Math.floor(llo)) / stride > 9) stride += 1;
            for (let e = Math.ceil(llo); e <= Math.floor(lhi) + 1e-9; e += stride) {
                out.push({ value: Math.pow(10, e), label: `1e${e}` });
            }
            return out;
        },
    };
}

export function formatNumber(v: number): string {
    if (v === 0) return "0";
    const a = Math.abs(v);
    if (a >= 1e5 || a < 1e-3) return v.toExponential(0);
    return String(Math.round(v * 1e6) / 1e6);
}

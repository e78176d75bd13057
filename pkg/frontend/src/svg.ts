export type Attrs = Record<string, string | number>;

export function el(name: string, attrs: Attrs, children: string[] = []): string {
    const parts = Object.entries(attrs).map(([k, v]) => `${k}="${v}"`);
    const head = `<${name}${parts.length ? " " + parts.join(" ") : ""}`;
    if (children.length === 0) return `${head}/>`;
    return `${head}>${children.join("")}</${name}>`;
}

export function text(content: string, attrs: Attrs): string {
    return el("text", { "font-family": "sans-serif", ...attrs }, [escapeXml(content)]);
}

export function escapeXml(s: string): string {
    return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function px(v: number): string {
    return String(Math.round(v * 100) / 100);
}

export function points(xs: number[], ys: number[]): string {
    const out: string[] = [];
    for (let i = 0; i < xs.length; i++) {
        out.push(`${px(xs[i])},${px(ys[i])}`);
    }
    return out.join(" ");
}

export function document(width: number, height: number, children: string[]): string {
    return el("svg", {
        xmlns: "http://www.w3.org/2000/svg",
        width,
        height,
        viewBox: `0 0 ${width} ${height}`,
    }, [el("rect", { x: 0, y: 0, width, height, fill: "white" }), ...children]) + "\n";
}

export const PALETTE = ["#1f6fb2", "#d95f02", "#4daf4a", "#7a5195", "#c0392b", "#5c6b73"];

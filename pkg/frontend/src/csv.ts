import { readFileSync } from "fs";

export interface Table {
    columns: string[];
    rows: number[][];
}

/** Read a CSV with an exact expected header; every cell must be numeric.
 *  Inputs are never modified. */
export function readTable(path: string, expectedColumns: string[]): Table {
    const text = readFileSync(path, "utf8");
    const lines = text.split("\n").filter(line => line.trim().length > 0);
    if (lines.length === 0) {
        throw new Error(`${path}: file is empty`);
    }
    const columns = lines[0].split(",").map(c => c.trim());
    for (let i = 0; i < expectedColumns.length; i++) {
        if (i >= columns.length) {
            throw new Error(`${path}: missing column '${expectedColumns[i]}'`);
        }
        if (columns[i] !== expectedColumns[i]) {
            throw new Error(
                `${path}: expected column '${expectedColumns[i]}' at position ${i + 1}, found '${columns[i]}'`);
        }
    }
    if (columns.length > expectedColumns.length) {
        throw new Error(`${path}: unexpected column '${columns[expectedColumns.length]}'`);
    }
    const rows: number[][] = [];
    for (let r = 1; r < lines.length; r++) {
        const cells = lines[r].split(",");
        if (cells.length !== columns.length) {
            throw new Error(`${path}: row ${r + 1} has ${cells.length} cells, expected ${columns.length}`);
        }
        const row = cells.map((cell, c) => {
            const value = Number(cell);
            if (!Number.isFinite(value)) {
                throw new Error(`${path}: row ${r + 1}, column '${columns[c]}' is not numeric: '${cell.trim()}'`);
            }
            return value;
        });
        rows.push(row);
    }
    return { columns, rows };
}

export function column(table: Table, name: string): number[] {
    const index = table.columns.indexOf(name);
    if (index < 0) {
        throw new Error(`missing column '${name}'`);
    }
    return table.rows.map(row => row[index]);
}

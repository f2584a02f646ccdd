/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_curves_free: (a: number, b: number) => void;
export const __wbg_spectrum_free: (a: number, b: number) => void;
export const compare: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number];
export const curves_beta: (a: number) => [number, number];
export const curves_vite: (a: number) => [number, number];
export const curves_vqnhite: (a: number) => [number, number];
export const exact_curve: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const spectrum: (a: number, b: number, c: number) => [number, number, number];
export const spectrum_eigenvalues: (a: number) => [number, number];
export const spectrum_gap: (a: number) => number;
export const spectrum_overlap: (a: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;

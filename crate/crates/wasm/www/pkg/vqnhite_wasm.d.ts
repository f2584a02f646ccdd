/* tslint:disable */
/* eslint-disable */

export class Curves {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    beta(): Float64Array;
    vite(): Float64Array;
    vqnhite(): Float64Array;
}

export class Spectrum {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    eigenvalues(): Float64Array;
    readonly gap: number;
    /**
     * `|⟨ground|+…+⟩|²`
     */
    readonly overlap: number;
}

/**
 * Fidelity with the exact state along β for both methods on one instance.
 * `layout` is `"nn"` or `"all"`.
 */
export function compare(fields: Float64Array, coupling: number, layout: string, dbeta: number, beta_max: number, seed: number): Curves;

/**
 * Exact ITE from `|+…+⟩`: rows of `[β, F(ψ(β), ground), ⟨H⟩]`, flattened.
 */
export function exact_curve(fields: Float64Array, coupling: number, dbeta: number, beta_max: number): Float64Array;

export function spectrum(fields: Float64Array, coupling: number): Spectrum;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_curves_free: (a: number, b: number) => void;
    readonly __wbg_spectrum_free: (a: number, b: number) => void;
    readonly compare: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number];
    readonly curves_beta: (a: number) => [number, number];
    readonly curves_vite: (a: number) => [number, number];
    readonly curves_vqnhite: (a: number) => [number, number];
    readonly exact_curve: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly spectrum: (a: number, b: number, c: number) => [number, number, number];
    readonly spectrum_eigenvalues: (a: number) => [number, number];
    readonly spectrum_gap: (a: number) => number;
    readonly spectrum_overlap: (a: number) => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;

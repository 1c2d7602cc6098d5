/* tslint:disable */
/* eslint-disable */

/**
 * A parsed graph with its exhaustive stability landscape.
 */
export class Landscape {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Ground-state lambda_L against K_s, plus stable-configuration counts.
     */
    lambdaCurves(k: number, ks_max: number, points: number): string;
    /**
     * Per-energy min/max of lambda_L at one K_s.
     */
    levelStats(k: number, ks: number): string;
    constructor(text: string);
    readonly nodes: number;
}

export function randomGraph(n: number, m: number, seed: bigint): string;

export function trace(text: string, k: number, ks: number, kn: number, seed: bigint, t_max: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_landscape_free: (a: number, b: number) => void;
    readonly landscape_lambdaCurves: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly landscape_levelStats: (a: number, b: number, c: number) => [number, number, number, number];
    readonly landscape_new: (a: number, b: number) => [number, number, number];
    readonly landscape_nodes: (a: number) => number;
    readonly randomGraph: (a: number, b: number, c: bigint) => [number, number, number, number];
    readonly trace: (a: number, b: number, c: number, d: number, e: number, f: bigint, g: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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

/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_landscape_free: (a: number, b: number) => void;
export const landscape_lambdaCurves: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const landscape_levelStats: (a: number, b: number, c: number) => [number, number, number, number];
export const landscape_new: (a: number, b: number) => [number, number, number];
export const landscape_nodes: (a: number) => number;
export const randomGraph: (a: number, b: number, c: bigint) => [number, number, number, number];
export const trace: (a: number, b: number, c: number, d: number, e: number, f: bigint, g: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;

/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const assess_point: (a: number, b: number, c: number) => [number, number, number, number];
export const critical_p: () => number;
export const phase_boundary: (a: number, b: number, c: number) => [number, number, number, number];
export const qber_curve: (a: number, b: number, c: number) => [number, number, number, number];
export const simulate: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;

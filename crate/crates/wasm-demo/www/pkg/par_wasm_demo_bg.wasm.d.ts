/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_session_free: (a: number, b: number) => void;
export const compare_planners: (a: number, b: number, c: number, d: number, e: number) => [number, number];
export const session_hint: (a: number) => [number, number];
export const session_instruct: (a: number, b: number, c: number) => [number, number];
export const session_new: (a: number, b: number, c: bigint, d: number, e: number) => number;
export const session_state: (a: number) => [number, number];
export const train_location_reporter: (a: number, b: bigint) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;

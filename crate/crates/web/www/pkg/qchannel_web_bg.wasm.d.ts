/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const capacity_curve: (a: number, b: number) => [number, number, number, number];
export const ghz_teleport_table: (a: number, b: number) => [number, number, number, number];
export const teleclone_state: (a: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;

/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const bestVariant: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number, number];
export const bones: () => [number, number];
export const detectorResponse: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
export const jointNames: () => [number, number];
export const keyPose: (a: number) => [number, number];
export const mirrorPose: (a: number, b: number) => [number, number, number, number];
export const scalePose: (a: number, b: number, c: number) => [number, number, number, number];
export const toleranceSvg: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_drop_slice: (a: number, b: number) => void;
export const __wbindgen_start: () => void;

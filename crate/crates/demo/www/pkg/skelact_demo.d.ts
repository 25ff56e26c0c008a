/* tslint:disable */
/* eslint-disable */

export function bestVariant(prototype: Float64Array, test: Float64Array, sigma0: number, alpha: number, reflection: boolean, etas: Float64Array): Float64Array;

/**
 * Bone endpoints as a flat `[a0, b0, a1, b1, ...]` index list.
 */
export function bones(): Uint32Array;

export function detectorResponse(prototype: Float64Array, test: Float64Array, sigma0: number, alpha: number, squared: boolean, upper_only: boolean): Float64Array;

export function jointNames(): string[];

export function keyPose(index: number): Float64Array;

export function mirrorPose(test: Float64Array): Float64Array;

export function scalePose(test: Float64Array, factor: number): Float64Array;

export function toleranceSvg(prototype: Float64Array, sigma0: number, alpha: number, upper_only: boolean): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly bestVariant: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number, number];
    readonly bones: () => [number, number];
    readonly detectorResponse: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
    readonly jointNames: () => [number, number];
    readonly keyPose: (a: number) => [number, number];
    readonly mirrorPose: (a: number, b: number) => [number, number, number, number];
    readonly scalePose: (a: number, b: number, c: number) => [number, number, number, number];
    readonly toleranceSvg: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_drop_slice: (a: number, b: number) => void;
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

/* tslint:disable */
/* eslint-disable */

/**
 * One episode driven by instructions typed in the page. The episode is
 * re-simulated from its seed after every instruction.
 */
export class Session {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * What the oracle planner would say next.
     */
    hint(): string;
    /**
     * Sends one instruction and returns the new state.
     */
    instruct(text: string): string;
    constructor(task: string, seed: bigint, noise: number, error_rate: number);
    state(): string;
}

/**
 * Success rate of every scripted planner on `episodes` seeded episodes.
 */
export function compare_planners(task: string, noise: number, error_rate: number, episodes: number): string;

/**
 * Trains the wall-proximity reporter and returns its learning curve.
 */
export function train_location_reporter(episodes: number, seed: bigint): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_session_free: (a: number, b: number) => void;
    readonly compare_planners: (a: number, b: number, c: number, d: number, e: number) => [number, number];
    readonly session_hint: (a: number) => [number, number];
    readonly session_instruct: (a: number, b: number, c: number) => [number, number];
    readonly session_new: (a: number, b: number, c: bigint, d: number, e: number) => number;
    readonly session_state: (a: number) => [number, number];
    readonly train_location_reporter: (a: number, b: bigint) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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

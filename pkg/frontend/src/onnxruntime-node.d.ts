/**
 * Minimal ambient surface of onnxruntime-node (an optional dependency that
 * is only imported dynamically when a real backbone is requested), so the
 * package compiles in environments where the native runtime is absent.
 */
declare module 'onnxruntime-node' {
  export class Tensor {
    constructor(type: 'float32', data: Float32Array, dims: number[])
    readonly data: Float32Array | number[]
  }

  export interface SessionOptions {
    executionProviders?: string[]
  }

  export class InferenceSession {
    static create(path: string, options?: SessionOptions): Promise<InferenceSession>
    readonly inputNames: string[]
    readonly outputNames: string[]
    run(feeds: Record<string, Tensor>): Promise<Record<string, Tensor>>
  }
}

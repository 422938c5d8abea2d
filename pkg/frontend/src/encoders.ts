/**
 * Image encoders. Real backbones run through onnxruntime sessions loaded
 * from user-supplied .onnx exports; the deterministic stub encoder keeps the
 * pipeline testable without model weights.
 */
import path from 'node:path'
import type { RgbImage } from './datasets.js'
import {
  CLIP_PREPROCESSING,
  IMAGENET_PREPROCESSING,
  Preprocessing,
  preprocess,
} from './preprocess.js'

export interface Encoder {
  name: string
  dim: number
  preprocessing: Preprocessing
  encodeBatch(images: RgbImage[]): Promise<Float32Array[]>
}

interface ModelSpec {
  dim: number
  preprocessing: Preprocessing
  aliases: string[]
}

/** Canonical model registry; dims fix the output column blocks. */
export const MODEL_REGISTRY: Record<string, ModelSpec> = {
  'resnet18-penultimate': {
    dim: 512,
    preprocessing: IMAGENET_PREPROCESSING,
    aliases: ['resnet18'],
  },
  'clip-vit-l-14-image': {
    dim: 768,
    preprocessing: CLIP_PREPROCESSING,
    aliases: ['clip-vit-l-14', 'clip'],
  },
  'dinov2-vit-b-14': {
    dim: 768,
    preprocessing: IMAGENET_PREPROCESSING,
    aliases: ['dinov2'],
  },
}

export function resolveModelName(name: string): string {
  if (name in MODEL_REGISTRY) return name
  for (const [canonical, spec] of Object.entries(MODEL_REGISTRY)) {
    if (spec.aliases.includes(name)) return canonical
  }
  if (name.startsWith('stub:')) return name
  const known = [...Object.keys(MODEL_REGISTRY), 'stub:<dim>'].join(', ')
  throw new Error(`unknown model '${name}' (expected one of ${known})`)
}

function splitmix64(state: bigint): [bigint, bigint] {
  const mask = 0xffffffffffffffffn
  state = (state + 0x9e3779b97f4a7c15n) & mask
  let z = state
  z = ((z ^ (z >> 30n)) * 0xbf58476d1ce4e5b9n) & mask
  z = ((z ^ (z >> 27n)) * 0x94d049bb133111ebn) & mask
  z = z ^ (z >> 31n)
  return [state, z]
}

function hashString(text: string): bigint {
  let h = 0xcbf29ce484222325n
  for (const ch of text) {
    h = ((h ^ BigInt(ch.codePointAt(0)!)) * 0x100000001b3n) & 0xffffffffffffffffn
  }
  return h
}

const STUB_POOL = 8 // pooled grid per channel feeding the projection

/**
 * Deterministic test encoder: pools the preprocessed tensor to an 8x8 grid
 * per channel and projects it with weights derived from the encoder name.
 * Same image + same name => bit-identical features, no weights needed.
 */
export function stubEncoder(dim: number, name = `stub:${dim}`): Encoder {
  if (!Number.isInteger(dim) || dim < 1) {
    throw new Error(`stub encoder needs a positive integer dim, got ${dim}`)
  }
  const preprocessing = IMAGENET_PREPROCESSING
  const inputs = STUB_POOL * STUB_POOL * 3
  const weights = new Float32Array(dim * inputs)
  let state = hashString(name)
  for (let i = 0; i < weights.length; i++) {
    let z: bigint
    ;[state, z] = splitmix64(state)
    weights[i] = Number(z >> 11n) / 2 ** 53 - 0.5
  }
  return {
    name,
    dim,
    preprocessing,
    async encodeBatch(images) {
      return images.map((image) => {
        const tensor = preprocess(image, preprocessing)
        const size = preprocessing.cropSize
        const cell = size / STUB_POOL
        const pooled = new Float32Array(inputs)
        for (let c = 0; c < 3; c++) {
          for (let gy = 0; gy < STUB_POOL; gy++) {
            for (let gx = 0; gx < STUB_POOL; gx++) {
              let sum = 0
              let count = 0
              for (let y = Math.floor(gy * cell); y < Math.floor((gy + 1) * cell); y++) {
                for (let x = Math.floor(gx * cell); x < Math.floor((gx + 1) * cell); x++) {
                  sum += tensor[c * size * size + y * size + x]
                  count++
                }
              }
              pooled[(c * STUB_POOL + gy) * STUB_POOL + gx] = sum / count
            }
          }
        }
        const features = new Float32Array(dim)
        for (let j = 0; j < dim; j++) {
          let acc = 0
          for (let r = 0; r < inputs; r++) {
            acc += pooled[r] * weights[j * inputs + r]
          }
          features[j] = acc
        }
        return features
      })
    },
  }
}

/**
 * ONNX-backed encoder. Expects a session taking [N, 3, crop, crop] float32
 * and returning [N, dim]; the model file is `<models-dir>/<name>.onnx`.
 */
export async function onnxEncoder(
  name: string,
  modelsDir: string,
  device: string,
): Promise<Encoder> {
  const spec = MODEL_REGISTRY[name]
  let ort: typeof import('onnxruntime-node')
  try {
    ort = await import('onnxruntime-node')
  } catch {
    throw new Error(
      'onnxruntime-node is not installed; install it or use stub:<dim> models',
    )
  }
  const modelPath = path.join(modelsDir, `${name}.onnx`)
  const session = await ort.InferenceSession.create(modelPath, {
    executionProviders: device === 'cpu' ? ['cpu'] : [device, 'cpu'],
  })
  const inputName = session.inputNames[0]
  const outputName = session.outputNames[0]
  const size = spec.preprocessing.cropSize
  return {
    name,
    dim: spec.dim,
    preprocessing: spec.preprocessing,
    async encodeBatch(images) {
      const batch = new Float32Array(images.length * 3 * size * size)
      images.forEach((image, i) => {
        batch.set(preprocess(image, spec.preprocessing), i * 3 * size * size)
      })
      const feeds = {
        [inputName]: new ort.Tensor('float32', batch, [images.length, 3, size, size]),
      }
      const results = await session.run(feeds)
      const output = results[outputName]
      const flat = output.data as Float32Array
      if (flat.length !== images.length * spec.dim) {
        throw new Error(
          `${name}: expected ${images.length}x${spec.dim} output, got ${flat.length} values`,
        )
      }
      return images.map((_, i) =>
        Float32Array.from(flat.subarray(i * spec.dim, (i + 1) * spec.dim)),
      )
    },
  }
}

export async function buildEncoder(
  rawName: string,
  options: { modelsDir?: string; device?: string },
): Promise<Encoder> {
  const name = resolveModelName(rawName)
  if (name.startsWith('stub:')) {
    return stubEncoder(Number(name.slice('stub:'.length)), name)
  }
  if (!options.modelsDir) {
    throw new Error(
      `model '${name}' needs --models-dir pointing at its .onnx export ` +
        '(or use stub:<dim> for a weightless deterministic encoder)',
    )
  }
  return onnxEncoder(name, options.modelsDir, options.device ?? 'cpu')
}

/**
 * Per-backbone input pipelines: resize shorter side, center crop, and
 * channel normalization, producing CHW float32 tensors.
 */
import type { RgbImage } from './datasets.js'

export interface Preprocessing {
  resizeShorter: number
  cropSize: number
  mean: [number, number, number]
  std: [number, number, number]
}

export const IMAGENET_PREPROCESSING: Preprocessing = {
  resizeShorter: 256,
  cropSize: 224,
  mean: [0.485, 0.456, 0.406],
  std: [0.229, 0.224, 0.225],
}

export const CLIP_PREPROCESSING: Preprocessing = {
  resizeShorter: 224,
  cropSize: 224,
  mean: [0.48145466, 0.4578275, 0.40821073],
  std: [0.26862954, 0.26130258, 0.27577711],
}

function bilinearResize(image: RgbImage, width: number, height: number): Float32Array {
  const out = new Float32Array(width * height * 3)
  const sx = image.width / width
  const sy = image.height / height
  for (let y = 0; y < height; y++) {
    const fy = Math.min((y + 0.5) * sy - 0.5, image.height - 1)
    const y0 = Math.max(0, Math.floor(fy))
    const y1 = Math.min(image.height - 1, y0 + 1)
    const wy = Math.max(0, fy - y0)
    for (let x = 0; x < width; x++) {
      const fx = Math.min((x + 0.5) * sx - 0.5, image.width - 1)
      const x0 = Math.max(0, Math.floor(fx))
      const x1 = Math.min(image.width - 1, x0 + 1)
      const wx = Math.max(0, fx - x0)
      for (let c = 0; c < 3; c++) {
        const p00 = image.pixels[(y0 * image.width + x0) * 3 + c]
        const p01 = image.pixels[(y0 * image.width + x1) * 3 + c]
        const p10 = image.pixels[(y1 * image.width + x0) * 3 + c]
        const p11 = image.pixels[(y1 * image.width + x1) * 3 + c]
        const top = p00 + (p01 - p00) * wx
        const bottom = p10 + (p11 - p10) * wx
        out[(y * width + x) * 3 + c] = top + (bottom - top) * wy
      }
    }
  }
  return out
}

/** Resize shorter side, center crop, normalize; returns CHW layout. */
export function preprocess(image: RgbImage, spec: Preprocessing): Float32Array {
  const scale = spec.resizeShorter / Math.min(image.width, image.height)
  const rw = Math.max(spec.cropSize, Math.round(image.width * scale))
  const rh = Math.max(spec.cropSize, Math.round(image.height * scale))
  const resized = bilinearResize(image, rw, rh)
  const ox = Math.floor((rw - spec.cropSize) / 2)
  const oy = Math.floor((rh - spec.cropSize) / 2)
  const size = spec.cropSize
  const out = new Float32Array(3 * size * size)
  for (let c = 0; c < 3; c++) {
    for (let y = 0; y < size; y++) {
      for (let x = 0; x < size; x++) {
        const v = resized[((y + oy) * rw + (x + ox)) * 3 + c]
        out[c * size * size + y * size + x] = (v - spec.mean[c]) / spec.std[c]
      }
    }
  }
  return out
}

export { encodeNpyF32, readNpyF32, writeNpyF32 } from './npy.js'
export { listImagesSorted, loadCifarBin, loadImage } from './datasets.js'
export type { RgbImage } from './datasets.js'
export {
  CLIP_PREPROCESSING,
  IMAGENET_PREPROCESSING,
  preprocess,
} from './preprocess.js'
export type { Preprocessing } from './preprocess.js'
export {
  MODEL_REGISTRY,
  buildEncoder,
  onnxEncoder,
  resolveModelName,
  stubEncoder,
} from './encoders.js'
export type { Encoder } from './encoders.js'
export { runExtract } from './extract.js'
export type { ExtractJob, ExtractResult } from './extract.js'

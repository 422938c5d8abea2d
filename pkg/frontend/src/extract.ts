/**
 * Extraction pipeline: enumerate the dataset in deterministic order, run
 * each requested encoder in batches, concatenate the per-model embedding
 * blocks column-wise, and write the .npy matrix plus a row manifest.
 */
import { promises as fs } from 'node:fs'
import { buildEncoder, Encoder } from './encoders.js'
import { listImagesSorted, loadCifarBin, loadImage, RgbImage } from './datasets.js'
import { writeNpyF32 } from './npy.js'

export interface ExtractJob {
  /** image directory, or 'cifar100:<path-to-train.bin>' / 'cifar10:<bin>' */
  dataset: string
  /** ordered model names; output columns follow this order */
  models: string[]
  batchSize: number
  out: string
  modelsDir?: string
  device?: string
  /** skip undecodable images (recorded in the manifest) instead of aborting */
  skipBadImages?: boolean
}

export interface ExtractResult {
  rows: number
  cols: number
  out: string
  manifestPath: string
  skipped: string[]
}

interface LoadedDataset {
  images: RgbImage[]
  skipped: string[]
}

async function loadDataset(job: ExtractJob): Promise<LoadedDataset> {
  if (job.dataset.startsWith('cifar100:') || job.dataset.startsWith('cifar10:')) {
    const [variant, file] = job.dataset.split(/:(.*)/s, 2) as [
      'cifar100' | 'cifar10',
      string,
    ]
    return { images: await loadCifarBin(file, variant), skipped: [] }
  }
  const files = await listImagesSorted(job.dataset)
  const images: RgbImage[] = []
  const skipped: string[] = []
  for (const file of files) {
    try {
      images.push(await loadImage(file))
    } catch (err) {
      if (!job.skipBadImages) throw err
      skipped.push(file)
    }
  }
  if (images.length === 0) {
    throw new Error(`${job.dataset}: every image failed to decode`)
  }
  return { images, skipped }
}

function assertFinite(block: Float32Array[], model: string) {
  block.forEach((features, i) => {
    for (const v of features) {
      if (!Number.isFinite(v)) {
        throw new Error(`${model}: non-finite feature in batch row ${i}`)
      }
    }
  })
}

export async function runExtract(
  job: ExtractJob,
  log: (msg: string) => void = () => {},
): Promise<ExtractResult> {
  if (job.models.length === 0) throw new Error('need at least one model')
  if (!Number.isInteger(job.batchSize) || job.batchSize < 1) {
    throw new Error(`batch size must be a positive integer, got ${job.batchSize}`)
  }
  const encoders: Encoder[] = []
  for (const name of job.models) {
    encoders.push(await buildEncoder(name, { modelsDir: job.modelsDir, device: job.device }))
  }
  const totalDim = encoders.reduce((acc, e) => acc + e.dim, 0)

  const { images, skipped } = await loadDataset(job)
  const rows = images.length
  log(`dataset: ${rows} examples, output ${rows}x${totalDim}`)

  const matrix = new Float32Array(rows * totalDim)
  let colOffset = 0
  for (const encoder of encoders) {
    for (let start = 0; start < rows; start += job.batchSize) {
      const batch = images.slice(start, start + job.batchSize)
      const features = await encoder.encodeBatch(batch)
      assertFinite(features, encoder.name)
      features.forEach((row, i) => {
        if (row.length !== encoder.dim) {
          throw new Error(`${encoder.name}: expected ${encoder.dim}-d features`)
        }
        matrix.set(row, (start + i) * totalDim + colOffset)
      })
      log(`${encoder.name}: ${Math.min(start + job.batchSize, rows)}/${rows}`)
    }
    colOffset += encoder.dim
  }

  await writeNpyF32(job.out, matrix, rows, totalDim)
  const manifestPath = `${job.out.replace(/\.npy$/, '')}.manifest.csv`
  const header = [
    `# dataset=${job.dataset}`,
    `# models=${encoders.map((e) => `${e.name}(${e.dim})`).join('+')}`,
    `# preprocessing=${encoders
      .map((e) => `${e.name}:resize${e.preprocessing.resizeShorter}/crop${e.preprocessing.cropSize}/bilinear`)
      .join(' ')}`,
    ...skipped.map((s) => `# skipped=${s}`),
    'row,source',
  ]
  const lines = images.map((img, i) => `${i},${img.source}`)
  await fs.writeFile(manifestPath, header.concat(lines).join('\n') + '\n')
  return { rows, cols: totalDim, out: job.out, manifestPath, skipped }
}

/**
 * Dataset enumeration with a deterministic row order: sorted file paths for
 * image folders, record order for CIFAR binary archives. Every row of the
 * output matrix traces back to a source identifier via the manifest.
 */
import { promises as fs } from 'node:fs'
import path from 'node:path'
import { PNG } from 'pngjs'

/** RGB image in [0, 1], channel-last. */
export interface RgbImage {
  width: number
  height: number
  /** length = width * height * 3 */
  pixels: Float32Array
  source: string
}

const IMAGE_EXTENSIONS = new Set(['.png', '.ppm'])

export async function listImagesSorted(dir: string): Promise<string[]> {
  const found: string[] = []
  async function walk(current: string) {
    const entries = await fs.readdir(current, { withFileTypes: true })
    entries.sort((a, b) => (a.name < b.name ? -1 : a.name > b.name ? 1 : 0))
    for (const entry of entries) {
      const full = path.join(current, entry.name)
      if (entry.isDirectory()) {
        await walk(full)
      } else if (IMAGE_EXTENSIONS.has(path.extname(entry.name).toLowerCase())) {
        found.push(full)
      }
    }
  }
  await walk(dir)
  found.sort()
  if (found.length === 0) {
    throw new Error(`no decodable images (.png/.ppm) under ${dir}`)
  }
  return found
}

function decodePng(buf: Buffer, source: string): RgbImage {
  const png = PNG.sync.read(buf)
  const pixels = new Float32Array(png.width * png.height * 3)
  for (let i = 0; i < png.width * png.height; i++) {
    pixels[i * 3] = png.data[i * 4] / 255
    pixels[i * 3 + 1] = png.data[i * 4 + 1] / 255
    pixels[i * 3 + 2] = png.data[i * 4 + 2] / 255
  }
  return { width: png.width, height: png.height, pixels, source }
}

function decodePpm(buf: Buffer, source: string): RgbImage {
  // P6 binary: "P6\n<w> <h>\n<maxval>\n" then raw RGB bytes
  const header = buf.subarray(0, 64).toString('latin1')
  const match = header.match(/^P6\s+(\d+)\s+(\d+)\s+(\d+)\s/)
  if (!match) throw new Error(`${source}: not a binary P6 ppm`)
  const [, w, h, maxval] = match
  const width = Number(w)
  const height = Number(h)
  const scale = Number(maxval)
  const offset = match[0].length
  const pixels = new Float32Array(width * height * 3)
  for (let i = 0; i < width * height * 3; i++) {
    pixels[i] = buf[offset + i] / scale
  }
  return { width, height, pixels, source }
}

export async function loadImage(file: string): Promise<RgbImage> {
  const buf = await fs.readFile(file)
  const ext = path.extname(file).toLowerCase()
  if (ext === '.png') return decodePng(buf, file)
  if (ext === '.ppm') return decodePpm(buf, file)
  throw new Error(`${file}: unsupported image type ${ext}`)
}

const CIFAR100_RECORD = 2 + 3 * 32 * 32 // coarse label, fine label, CHW pixels
const CIFAR10_RECORD = 1 + 3 * 32 * 32

/**
 * CIFAR binary archive (the "train.bin" layout): fixed-size records of
 * label byte(s) + 32x32 CHW RGB. Row order is the archive record order.
 */
export async function loadCifarBin(
  file: string,
  variant: 'cifar100' | 'cifar10' = 'cifar100',
): Promise<RgbImage[]> {
  const buf = await fs.readFile(file)
  const record = variant === 'cifar100' ? CIFAR100_RECORD : CIFAR10_RECORD
  const labelBytes = variant === 'cifar100' ? 2 : 1
  if (buf.length === 0 || buf.length % record !== 0) {
    throw new Error(`${file}: size ${buf.length} is not a multiple of ${record}`)
  }
  const count = buf.length / record
  const images: RgbImage[] = []
  for (let r = 0; r < count; r++) {
    const base = r * record + labelBytes
    const pixels = new Float32Array(32 * 32 * 3)
    for (let p = 0; p < 32 * 32; p++) {
      // archive stores channel-major planes
      pixels[p * 3] = buf[base + p] / 255
      pixels[p * 3 + 1] = buf[base + 1024 + p] / 255
      pixels[p * 3 + 2] = buf[base + 2048 + p] / 255
    }
    images.push({ width: 32, height: 32, pixels, source: `${file}#${r}` })
  }
  return images
}

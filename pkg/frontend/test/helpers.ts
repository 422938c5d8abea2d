import { promises as fs } from 'node:fs'
import path from 'node:path'
import { PNG } from 'pngjs'

/** Deterministic little RGB png with a per-seed gradient pattern. */
export function makePng(width: number, height: number, seed: number): Buffer {
  const png = new PNG({ width, height })
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      const i = (y * width + x) * 4
      png.data[i] = (x * 7 + seed * 13) % 256
      png.data[i + 1] = (y * 11 + seed * 29) % 256
      png.data[i + 2] = (x + y + seed * 41) % 256
      png.data[i + 3] = 255
    }
  }
  return PNG.sync.write(png)
}

export async function makeImageDir(
  dir: string,
  count: number,
  size = 48,
): Promise<string[]> {
  await fs.mkdir(dir, { recursive: true })
  const names: string[] = []
  for (let i = 0; i < count; i++) {
    const name = `img_${String(i).padStart(3, '0')}.png`
    await fs.writeFile(path.join(dir, name), makePng(size, size, i))
    names.push(name)
  }
  return names
}

/** Synthetic CIFAR-100-layout archive: 2 label bytes + CHW pixels per record. */
export async function makeCifar100Bin(
  file: string,
  records: number,
): Promise<void> {
  const record = 2 + 3 * 32 * 32
  const buf = Buffer.alloc(records * record)
  for (let r = 0; r < records; r++) {
    const base = r * record
    buf[base] = r % 20
    buf[base + 1] = r % 100
    for (let p = 0; p < 1024; p++) {
      buf[base + 2 + p] = (p + r * 3) % 256
      buf[base + 2 + 1024 + p] = (p * 2 + r * 5) % 256
      buf[base + 2 + 2048 + p] = (p * 3 + r * 7) % 256
    }
  }
  await fs.writeFile(file, buf)
}

/**
 * Minimal .npy v1.0 writer/reader for little-endian float32 matrices —
 * the on-disk contract of the scoring engine's loader.
 */
import { promises as fs } from 'node:fs'

const MAGIC = Buffer.from('\x93NUMPY', 'latin1')

export function encodeNpyF32(data: Float32Array, rows: number, cols: number): Buffer {
  if (data.length !== rows * cols) {
    throw new Error(`payload length ${data.length} != ${rows}x${cols}`)
  }
  let header = `{'descr': '<f4', 'fortran_order': False, 'shape': (${rows}, ${cols}), }`
  const pad = (64 - ((10 + header.length + 1) % 64)) % 64
  header = header + ' '.repeat(pad) + '\n'
  const head = Buffer.alloc(10)
  MAGIC.copy(head, 0)
  head[6] = 1
  head[7] = 0
  head.writeUInt16LE(header.length, 8)
  const payload = Buffer.from(data.buffer, data.byteOffset, data.byteLength)
  return Buffer.concat([head, Buffer.from(header, 'latin1'), payload])
}

export async function writeNpyF32(
  path: string,
  data: Float32Array,
  rows: number,
  cols: number,
): Promise<void> {
  await fs.writeFile(path, encodeNpyF32(data, rows, cols))
}

export interface NpyMatrix {
  rows: number
  cols: number
  data: Float32Array
}

/** Reads back the same subset this module writes (used by tests). */
export async function readNpyF32(path: string): Promise<NpyMatrix> {
  const buf = await fs.readFile(path)
  if (!buf.subarray(0, 6).equals(MAGIC) || buf[6] !== 1 || buf[7] !== 0) {
    throw new Error(`${path}: not an npy v1.0 file`)
  }
  const headerLen = buf.readUInt16LE(8)
  const header = buf.subarray(10, 10 + headerLen).toString('latin1')
  const shape = header.match(/'shape':\s*\((\d+),\s*(\d+)\s*\)/)
  if (!header.includes("'<f4'") || !shape) {
    throw new Error(`${path}: expected a 2-D <f4 header, got ${header.trim()}`)
  }
  const rows = Number(shape[1])
  const cols = Number(shape[2])
  const start = 10 + headerLen
  const expected = rows * cols * 4
  if (buf.length - start !== expected) {
    throw new Error(`${path}: payload is ${buf.length - start} bytes, expected ${expected}`)
  }
  const data = new Float32Array(rows * cols)
  for (let i = 0; i < data.length; i++) {
    data[i] = buf.readFloatLE(start + i * 4)
  }
  return { rows, cols, data }
}

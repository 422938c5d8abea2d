import { mkdtemp, rm } from 'node:fs/promises'
import os from 'node:os'
import path from 'node:path'
import { afterEach, beforeEach, describe, expect, it } from 'vitest'
import { encodeNpyF32, readNpyF32, writeNpyF32 } from '../src/npy.js'

let dir: string
beforeEach(async () => {
  dir = await mkdtemp(path.join(os.tmpdir(), 'npy-'))
})
afterEach(async () => {
  await rm(dir, { recursive: true, force: true })
})

describe('npy writer', () => {
  it('round-trips float32 matrices bit-exactly', async () => {
    const data = Float32Array.from({ length: 12 }, (_, i) => Math.sin(i) * 1e3)
    const file = path.join(dir, 'm.npy')
    await writeNpyF32(file, data, 3, 4)
    const back = await readNpyF32(file)
    expect(back.rows).toBe(3)
    expect(back.cols).toBe(4)
    expect(Array.from(back.data)).toEqual(Array.from(data))
  })

  it('emits a 64-byte-aligned v1.0 header', () => {
    const buf = encodeNpyF32(new Float32Array(6), 2, 3)
    expect(buf.subarray(0, 6).toString('latin1')).toBe('\x93NUMPY')
    expect(buf[6]).toBe(1)
    expect(buf[7]).toBe(0)
    const headerLen = buf.readUInt16LE(8)
    expect((10 + headerLen) % 64).toBe(0)
    const header = buf.subarray(10, 10 + headerLen).toString('latin1')
    expect(header).toContain("'descr': '<f4'")
    expect(header).toContain("'fortran_order': False")
    expect(header).toContain("'shape': (2, 3)")
  })

  it('rejects mismatched payload sizes', () => {
    expect(() => encodeNpyF32(new Float32Array(5), 2, 3)).toThrow(/length/)
  })
})

#!/usr/bin/env node
/**
 * zcore-extract: write embedding matrices the scoring CLI can consume.
 *
 *   zcore-extract --dataset ./images --model resnet18 --model clip-vit-l-14 \
 *                 --batch 256 --out emb.npy --models-dir ./onnx
 */
import process from 'node:process'
import { runExtract } from './extract.js'

interface CliArgs {
  dataset?: string
  models: string[]
  batch: number
  out?: string
  modelsDir?: string
  device: string
  onError: 'skip' | 'abort'
}

function parseArgs(argv: string[]): CliArgs {
  const args: CliArgs = { models: [], batch: 256, device: 'cpu', onError: 'abort' }
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i]
    const next = () => {
      if (i + 1 >= argv.length) throw new Error(`flag ${flag} needs a value`)
      return argv[++i]
    }
    switch (flag) {
      case '--dataset':
        args.dataset = next()
        break
      case '--model':
        args.models.push(next())
        break
      case '--batch':
        args.batch = Number(next())
        break
      case '--out':
        args.out = next()
        break
      case '--models-dir':
        args.modelsDir = next()
        break
      case '--device':
        args.device = next()
        break
      case '--on-error': {
        const value = next()
        if (value !== 'skip' && value !== 'abort') {
          throw new Error(`--on-error must be skip or abort, got ${value}`)
        }
        args.onError = value
        break
      }
      case '--help':
      case '-h':
        console.log(
          'usage: zcore-extract --dataset <dir|cifar100:train.bin> ' +
            '--model <name> [--model <name> ...] [--batch N] --out emb.npy ' +
            '[--models-dir dir] [--device cpu] [--on-error skip|abort]',
        )
        process.exit(0)
        break
      default:
        throw new Error(`unknown flag ${flag}`)
    }
  }
  if (!args.dataset) throw new Error('--dataset is required')
  if (!args.out) throw new Error('--out is required')
  if (args.models.length === 0) throw new Error('at least one --model is required')
  return args
}

async function main() {
  const args = parseArgs(process.argv.slice(2))
  const result = await runExtract(
    {
      dataset: args.dataset!,
      models: args.models,
      batchSize: args.batch,
      out: args.out!,
      modelsDir: args.modelsDir,
      device: args.device,
      skipBadImages: args.onError === 'skip',
    },
    (msg) => console.error(msg),
  )
  console.error(
    `wrote ${result.rows}x${result.cols} to ${result.out} ` +
      `(manifest ${result.manifestPath}, ${result.skipped.length} skipped)`,
  )
}

main().catch((err) => {
  console.error(`error: ${err instanceof Error ? err.message : err}`)
  process.exit(1)
})

#!/usr/bin/env node
/**
 * CLI: extract logit records from an image folder.
 *
 *   hedgekit-adapter extract --images ./imgs --manifest manifest.json \
 *       --out records.jsonl [--perturbation jpeg_qf90] [--group wild]
 *
 * `stub-checkpoints` materializes seeded stand-in checkpoints plus a
 * matching manifest for dry runs without real detector weights.
 */

import { mkdirSync, writeFileSync } from 'fs'
import { join } from 'path'

import yargs from 'yargs'
import { hideBin } from 'yargs/helpers'

import { extractLogits } from './extract'
import {
  DEFAULT_TTA_MODELS,
  EXPECTED_RESOLUTION,
  loadManifest,
} from './manifest'
import { buildTinyBackbone, saveModel } from './model'
import { ModelId, writeRecords } from './records'

const ALL_MODELS: ModelId[] = ['M1', 'M2', 'M3', 'M4', 'M5']

async function main(): Promise<void> {
  await yargs(hideBin(process.argv))
    .command(
      'extract',
      'run manifest models over an image folder and emit logit records',
      (cmd) =>
        cmd
          .option('images', { type: 'string', demandOption: true })
          .option('manifest', { type: 'string', demandOption: true })
          .option('out', { type: 'string', demandOption: true })
          .option('perturbation', { type: 'string' })
          .option('group', { type: 'string' }),
      async (argv) => {
        const manifest = loadManifest(argv.manifest)
        const records = await extractLogits(argv.images, manifest, {
          perturbation: argv.perturbation,
          group: argv.group,
        })
        writeRecords(argv.out, records)
        console.log(`wrote ${records.length} records to ${argv.out}`)
      },
    )
    .command(
      'stub-checkpoints',
      'write seeded stand-in checkpoints and a manifest for all five slots',
      (cmd) =>
        cmd
          .option('out', { type: 'string', demandOption: true })
          .option('seed', { type: 'number', default: 0 }),
      async (argv) => {
        mkdirSync(argv.out, { recursive: true })
        const entries = []
        for (const [index, modelId] of ALL_MODELS.entries()) {
          const dir = join(argv.out, modelId)
          await saveModel(buildTinyBackbone(argv.seed + index * 10), dir)
          entries.push({
            model_id: modelId,
            checkpoint: dir,
            resolution: EXPECTED_RESOLUTION[modelId],
            normalization: { mean: [0.5, 0.5, 0.5], std: [0.5, 0.5, 0.5] },
            views: DEFAULT_TTA_MODELS.includes(modelId)
              ? ['orig', 'hflip']
              : ['orig'],
          })
        }
        const manifestPath = join(argv.out, 'manifest.json')
        writeFileSync(manifestPath, JSON.stringify({ models: entries }, null, 2))
        console.log(`wrote 5 stub checkpoints and ${manifestPath}`)
      },
    )
    .demandCommand(1)
    .strict()
    .fail((msg, err) => {
      console.error(err ? `${err}` : msg)
      process.exit(1)
    })
    .parseAsync()
}

main().catch((err) => {
  console.error(`${err}`)
  process.exit(1)
})

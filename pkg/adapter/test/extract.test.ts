import { spawnSync } from 'child_process'
import { mkdtempSync, readFileSync, writeFileSync } from 'fs'
import { tmpdir } from 'os'
import { join } from 'path'

import * as jpeg from 'jpeg-js'
import { PNG } from 'pngjs'
import { beforeAll, describe, expect, it } from 'vitest'

import { extractLogits, listImages } from '../src/extract'
import {
  AdapterManifest,
  DEFAULT_TTA_MODELS,
  EXPECTED_RESOLUTION,
  parseManifest,
} from '../src/manifest'
import { buildTinyBackbone, loadModel, predictLogits, saveModel } from '../src/model'
import { decodeImageFile, hflip, imageToTensor, preprocess } from '../src/image'
import { LogitRecord, writeRecords } from '../src/records'

const MODEL_IDS = ['M1', 'M2', 'M3', 'M4', 'M5'] as const

let workDir: string
let checkpointRoot: string
let imageDir: string
let manifest: AdapterManifest

function writeTestPng(path: string, size: number, seed: number): void {
  const png = new PNG({ width: size, height: size })
  for (let i = 0; i < size * size; i++) {
    // cheap deterministic pattern, different per seed and asymmetric in x
    const x = i % size
    const y = Math.floor(i / size)
    png.data[i * 4] = (x * 7 + seed * 31) % 256
    png.data[i * 4 + 1] = (y * 13 + seed * 17) % 256
    png.data[i * 4 + 2] = (x * y + seed) % 256
    png.data[i * 4 + 3] = 255
  }
  writeFileSync(path, PNG.sync.write(png))
}

function writeTestJpeg(path: string, size: number): void {
  const data = Buffer.alloc(size * size * 4)
  for (let i = 0; i < size * size; i++) {
    data[i * 4] = (i * 3) % 256
    data[i * 4 + 1] = (i * 5) % 256
    data[i * 4 + 2] = (i * 11) % 256
    data[i * 4 + 3] = 255
  }
  writeFileSync(path, jpeg.encode({ data, width: size, height: size }, 90).data)
}

function manifestFor(root: string): AdapterManifest {
  return parseManifest({
    models: MODEL_IDS.map((modelId, index) => ({
      model_id: modelId,
      checkpoint: join(root, modelId),
      resolution: EXPECTED_RESOLUTION[modelId],
      normalization: { mean: [0.5, 0.5, 0.5], std: [0.5, 0.5, 0.5] },
      views: DEFAULT_TTA_MODELS.includes(modelId) ? ['orig', 'hflip'] : ['orig'],
    })),
  })
}

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), 'adapter-test-'))
  checkpointRoot = join(workDir, 'checkpoints')
  imageDir = join(workDir, 'images')
  for (const [index, modelId] of MODEL_IDS.entries()) {
    await saveModel(buildTinyBackbone(100 + index), join(checkpointRoot, modelId))
  }
  const { mkdirSync } = await import('fs')
  mkdirSync(imageDir, { recursive: true })
  writeTestPng(join(imageDir, 'img-a.png'), 24, 1)
  writeTestPng(join(imageDir, 'img-b.png'), 24, 2)
  writeTestJpeg(join(imageDir, 'img-c.jpg'), 24)
  manifest = manifestFor(checkpointRoot)
})

describe('manifest validation', () => {
  it('rejects a resolution that contradicts the model slot', () => {
    expect(() =>
      parseManifest({
        models: [
          {
            model_id: 'M4',
            checkpoint: 'x',
            resolution: 256,
            views: ['orig'],
          },
        ],
      }),
    ).toThrow(/448/)
  })

  it('rejects duplicate model entries', () => {
    const entry = {
      model_id: 'M1',
      checkpoint: 'x',
      resolution: 256,
      views: ['orig'],
    }
    expect(() => parseManifest({ models: [entry, entry] })).toThrow(/duplicate/)
  })
})

describe('checkpoint round trip', () => {
  it('saved and reloaded models predict identically', async () => {
    const original = buildTinyBackbone(7)
    const dir = join(workDir, 'roundtrip')
    await saveModel(original, dir)
    const reloaded = await loadModel(dir)
    const image = imageToTensor(decodeImageFile(join(imageDir, 'img-a.png')))
    const batch = preprocess(image, 64, [0.5, 0.5, 0.5], [0.5, 0.5, 0.5])
    expect(predictLogits(reloaded, batch)).toEqual(predictLogits(original, batch))
  })
})

describe('preprocessing', () => {
  it('double flip restores the original logits', async () => {
    const model = await loadModel(join(checkpointRoot, 'M1'))
    const image = imageToTensor(decodeImageFile(join(imageDir, 'img-a.png')))
    const twice = hflip(hflip(image))
    const a = predictLogits(model, preprocess(image, 256, [0.5, 0.5, 0.5], [0.5, 0.5, 0.5]))
    const b = predictLogits(model, preprocess(twice, 256, [0.5, 0.5, 0.5], [0.5, 0.5, 0.5]))
    expect(b).toEqual(a)
  })

  it('flip changes the view of an asymmetric image', async () => {
    const model = await loadModel(join(checkpointRoot, 'M1'))
    const image = imageToTensor(decodeImageFile(join(imageDir, 'img-a.png')))
    const a = predictLogits(model, preprocess(image, 256, [0.5, 0.5, 0.5], [0.5, 0.5, 0.5]))
    const b = predictLogits(
      model,
      preprocess(hflip(image), 256, [0.5, 0.5, 0.5], [0.5, 0.5, 0.5]),
    )
    expect(b).not.toEqual(a)
  })
})

describe('extraction', () => {
  let records: LogitRecord[]

  beforeAll(async () => {
    records = await extractLogits(imageDir, manifest)
  })

  it('emits one record per model-view per image', () => {
    // 3 images x (3 single-view models + 2 TTA models x 2 views)
    expect(records).toHaveLength(3 * 7)
  })

  it('TTA models emit exactly two views per image', () => {
    for (const modelId of DEFAULT_TTA_MODELS) {
      const views = records
        .filter((r) => r.model_id === modelId && r.sample_id === 'img-a')
        .map((r) => r.view)
        .sort()
      expect(views).toEqual(['hflip', 'orig'])
    }
    const m1Views = records.filter((r) => r.model_id === 'M1').map((r) => r.view)
    expect(new Set(m1Views)).toEqual(new Set(['orig']))
  })

  it('all logits are finite numbers', () => {
    for (const record of records) {
      expect(Number.isFinite(record.logit_real)).toBe(true)
      expect(Number.isFinite(record.logit_fake)).toBe(true)
    }
  })

  it('empty directory yields an empty record list', async () => {
    const emptyDir = join(workDir, 'empty')
    const { mkdirSync } = await import('fs')
    mkdirSync(emptyDir, { recursive: true })
    expect(await extractLogits(emptyDir, manifest)).toEqual([])
    expect(listImages(emptyDir)).toEqual([])
  })

  it('unreadable images are skipped with a warning', async () => {
    const brokenDir = join(workDir, 'broken')
    const { mkdirSync } = await import('fs')
    mkdirSync(brokenDir, { recursive: true })
    writeFileSync(join(brokenDir, 'junk.png'), 'this is not a png')
    writeTestPng(join(brokenDir, 'fine.png'), 16, 3)
    const warnings: string[] = []
    const got = await extractLogits(brokenDir, manifest, {
      onWarning: (m) => warnings.push(m),
    })
    expect(got.map((r) => r.sample_id)).toContain('fine')
    expect(got.every((r) => r.sample_id !== 'junk')).toBe(true)
    expect(warnings.some((w) => w.includes('junk'))).toBe(true)
  })

  it('emitted files pass strict validation in the hedgekit harness', () => {
    const recordsPath = join(workDir, 'records.jsonl')
    const predsPath = join(workDir, 'preds.jsonl')
    writeRecords(recordsPath, records)

    const result = spawnSync(
      'python3',
      ['-m', 'hedgekit.cli', 'fuse', '--cohort', recordsPath, '--out', predsPath],
      { encoding: 'utf-8' },
    )
    expect(result.status, result.stderr).toBe(0)
    const predictions = readFileSync(predsPath, 'utf-8').trim().split('\n')
    expect(predictions).toHaveLength(3)
    for (const line of predictions) {
      const obj = JSON.parse(line)
      expect(obj.fake_score).toBeGreaterThanOrEqual(0)
      expect(obj.fake_score).toBeLessThanOrEqual(1)
    }
  })
})

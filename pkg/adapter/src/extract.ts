/**
 * Walk an image folder, run every manifest model over every readable
 * image (original + flipped views where flagged), and emit logit records
 * in the harness schema.
 */

import { readdirSync } from 'fs'
import { basename, extname, join } from 'path'

import * as tf from '@tensorflow/tfjs'

import { decodeImageFile, hflip, imageToTensor, preprocess } from './image'
import { AdapterManifest, viewsFor } from './manifest'
import { loadModel, predictLogits } from './model'
import { LogitRecord, ViewName } from './records'

const IMAGE_EXTENSIONS = new Set(['.png', '.jpg', '.jpeg'])

export interface ExtractOptions {
  /** Optional perturbation tag stamped on every record. */
  perturbation?: string
  /** Optional cohort/bucket tag stamped on every record. */
  group?: string
  onWarning?: (message: string) => void
}

export function listImages(dir: string): string[] {
  return readdirSync(dir)
    .filter((name) => IMAGE_EXTENSIONS.has(extname(name).toLowerCase()))
    .sort()
    .map((name) => join(dir, name))
}

export async function extractLogits(
  imageDir: string,
  manifest: AdapterManifest,
  options: ExtractOptions = {},
): Promise<LogitRecord[]> {
  const warn = options.onWarning ?? ((message: string) => console.warn(message))
  const models = new Map<string, tf.LayersModel>()
  for (const entry of manifest.models) {
    models.set(entry.model_id, await loadModel(entry.checkpoint))
  }

  const records: LogitRecord[] = []
  for (const path of listImages(imageDir)) {
    const sampleId = basename(path).replace(extname(path), '')
    let decoded
    try {
      decoded = decodeImageFile(path)
    } catch (err) {
      warn(`skipping unreadable image ${path}: ${err}`)
      continue
    }
    const image = imageToTensor(decoded)
    const flipped = hflip(image)
    for (const entry of manifest.models) {
      const model = models.get(entry.model_id)!
      for (const view of viewsFor(entry)) {
        const source = view === 'hflip' ? flipped : image
        const batch = preprocess(
          source,
          entry.resolution,
          entry.normalization.mean,
          entry.normalization.std,
        )
        const [logitReal, logitFake] = predictLogits(model, batch)
        batch.dispose()
        records.push({
          sample_id: sampleId,
          model_id: entry.model_id,
          view: view as ViewName,
          logit_real: logitReal,
          logit_fake: logitFake,
          ...(options.perturbation ? { perturbation: options.perturbation } : {}),
          ...(options.group ? { group: options.group } : {}),
        })
      }
    }
    image.dispose()
    flipped.dispose()
  }
  return records
}

/**
 * Checkpoint loading for tfjs layers models from plain directories
 * (model.json + weights.bin), no node bindings required.
 *
 * The directory layout matches the standard tfjs artifact format, so any
 * converted checkpoint with a two-logit head drops in; buildTinyBackbone
 * provides seeded stand-in checkpoints for tests and dry runs.
 */

import { mkdirSync, readFileSync, writeFileSync } from 'fs'
import { join } from 'path'

import * as tf from '@tensorflow/tfjs'

interface ManifestGroup {
  paths: string[]
  weights: tf.io.WeightsManifestEntry[]
}

export async function saveModel(model: tf.LayersModel, dir: string): Promise<void> {
  mkdirSync(dir, { recursive: true })
  await model.save(
    tf.io.withSaveHandler(async (artifacts) => {
      const weightData = artifacts.weightData as ArrayBuffer
      writeFileSync(join(dir, 'weights.bin'), Buffer.from(weightData))
      const manifest: ManifestGroup[] = [
        {
          paths: ['weights.bin'],
          weights: artifacts.weightSpecs ?? [],
        },
      ]
      writeFileSync(
        join(dir, 'model.json'),
        JSON.stringify({
          modelTopology: artifacts.modelTopology,
          weightsManifest: manifest,
        }),
      )
      return {
        modelArtifactsInfo: {
          dateSaved: new Date(),
          modelTopologyType: 'JSON',
        },
      }
    }),
  )
}

export async function loadModel(dir: string): Promise<tf.LayersModel> {
  const modelJson = JSON.parse(readFileSync(join(dir, 'model.json'), 'utf-8'))
  const weightSpecs: tf.io.WeightsManifestEntry[] = []
  const buffers: Buffer[] = []
  for (const group of modelJson.weightsManifest as ManifestGroup[]) {
    weightSpecs.push(...group.weights)
    for (const path of group.paths) {
      buffers.push(readFileSync(join(dir, path)))
    }
  }
  const weightData = Buffer.concat(buffers)
  return tf.loadLayersModel({
    load: async () => ({
      modelTopology: modelJson.modelTopology,
      weightSpecs,
      weightData: weightData.buffer.slice(
        weightData.byteOffset,
        weightData.byteOffset + weightData.byteLength,
      ),
    }),
  })
}

/**
 * A small deterministic conv backbone with a two-logit head, used as a
 * stand-in checkpoint. Global pooling keeps it resolution-agnostic, so
 * the same topology serves every ensemble slot.
 */
export function buildTinyBackbone(seed: number): tf.LayersModel {
  const model = tf.sequential()
  model.add(
    tf.layers.conv2d({
      inputShape: [null as unknown as number, null as unknown as number, 3],
      filters: 4,
      kernelSize: 3,
      strides: 2,
      activation: 'relu',
      kernelInitializer: tf.initializers.glorotUniform({ seed }),
      biasInitializer: 'zeros',
    }),
  )
  model.add(tf.layers.globalAveragePooling2d({ dataFormat: 'channelsLast' }))
  model.add(
    tf.layers.dense({
      units: 2,
      kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 1 }),
      biasInitializer: 'zeros',
    }),
  )
  return model
}

/** Run one preprocessed batch through a model; returns [logit_real, logit_fake]. */
export function predictLogits(model: tf.LayersModel, batch: tf.Tensor4D): [number, number] {
  const out = tf.tidy(() => model.predict(batch) as tf.Tensor2D)
  const values = out.dataSync()
  out.dispose()
  if (values.length !== 2) {
    throw new Error(`expected a two-logit head, got ${values.length} outputs`)
  }
  return [values[0], values[1]]
}
